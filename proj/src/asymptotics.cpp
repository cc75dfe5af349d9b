#include "cldp/asymptotics.hpp"

#include <array>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>

namespace cldp {

namespace {

constexpr int kChebNodes = 257;
// Smallest z-(k-1) served by a cache. Below this the cancellation in z-t
// caps the reachable relative accuracy, so queries fall back to direct
// recursion under the caller's tolerances.
constexpr double kCacheFloor = 3e-5;

// Barycentric Chebyshev interpolant of g(x) = W_m(m-1+e^x) e^(x(alpha-1))
// on x in [ln(kCacheFloor), 0]. Dividing out the left-endpoint growth and
// switching to a log abscissa leaves a smooth function: power corrections
// become exponentials and log corrections become linear.
class ChebCache {
  public:
    template <class F>
    ChebCache(double lo, double hi, const F& g) : lo_(lo), hi_(hi) {
        constexpr double pi = 3.14159265358979323846;
        for (int i = 0; i < kChebNodes; ++i) {
            const double t = std::cos(pi * i / (kChebNodes - 1));  // 1 .. -1
            nodes_[i] = 0.5 * (lo + hi) + 0.5 * (hi - lo) * t;
            values_[i] = g(nodes_[i]);
            weights_[i] = (i % 2 == 0 ? 1.0 : -1.0);
        }
        weights_[0] *= 0.5;
        weights_[kChebNodes - 1] *= 0.5;
    }

    double operator()(double x) const {
        double num = 0.0, den = 0.0;
        for (int i = 0; i < kChebNodes; ++i) {
            const double d = x - nodes_[i];
            if (d == 0.0) return values_[i];
            const double w = weights_[i] / d;
            num += w * values_[i];
            den += w;
        }
        return num / den;
    }

    double lo() const { return lo_; }

  private:
    double lo_, hi_;
    std::array<double, kChebNodes> nodes_{}, values_{}, weights_{};
};

struct CacheKey {
    int k;
    int64_t alpha_bits;
    bool operator<(const CacheKey& o) const {
        return k != o.k ? k < o.k : alpha_bits < o.alpha_bits;
    }
};

std::mutex g_cache_mutex;
std::map<CacheKey, std::shared_ptr<const ChebCache>> g_cache;

double w_eval(int k, double z, double alpha, const QuadratureSettings& settings, bool allow_cache);

// W_k by one level of the recursion; inner values interpolated when a cache
// level exists for k-1 >= 2.
double w_recurse(int k, double z, double alpha, const QuadratureSettings& settings) {
    if (z >= k) return 0.0;  // D_k(z) empty at and beyond the right endpoint
    const double lo = z - (k - 1);
    QuadratureSettings s = settings;
    s.lower_stretch_power = alpha + 1.0;
    auto f = [&](double t) { return w_eval(k - 1, z - t, alpha, settings, true) * std::pow(t, -alpha - 1.0); };
    return alpha * integrate_adaptive(f, lo, 1.0, s).value;
}

std::shared_ptr<const ChebCache> cache_for(int m, double alpha, const QuadratureSettings& settings) {
    int64_t bits;
    static_assert(sizeof(bits) == sizeof(alpha));
    std::memcpy(&bits, &alpha, sizeof(bits));
    const CacheKey key{m, bits};
    {
        std::lock_guard<std::mutex> lock(g_cache_mutex);
        auto it = g_cache.find(key);
        if (it != g_cache.end()) return it->second;
    }
    // Build outside the lock with fixed tolerances so every caller sees the
    // same values. rel 1e-9 is the practical roundoff floor at the deepest
    // nodes, where W_m reaches ~u^(1-alpha) ~ 1e16.
    (void)settings;
    QuadratureSettings tight;
    tight.abs_tol = 1e-12;
    tight.rel_tol = 1e-9;
    tight.max_subdivisions = 2000;
    auto g = [&](double x) {
        const double u = std::exp(x);
        return w_recurse(m, (m - 1) + u, alpha, tight) * std::pow(u, alpha - 1.0);
    };
    auto built = std::make_shared<const ChebCache>(std::log(kCacheFloor), 0.0, g);
    std::lock_guard<std::mutex> lock(g_cache_mutex);
    auto [it, inserted] = g_cache.emplace(key, built);
    return it->second;
}

double w_eval(int k, double z, double alpha, const QuadratureSettings& settings, bool allow_cache) {
    if (k == 0) return 1.0;
    if (z >= k) return 0.0;  // right-endpoint limit (D_k empty)
    if (k == 1) {
        // Direct quadrature of alpha t^(-alpha-1); the closed form z^-alpha - 1
        // is deliberately not used here.
        QuadratureSettings s = settings;
        s.lower_stretch_power = alpha + 1.0;
        auto f = [alpha](double t) { return std::pow(t, -alpha - 1.0); };
        return alpha * integrate_adaptive(f, z, 1.0, s).value;
    }
    if (allow_cache && k >= 2) {
        const double u = z - (k - 1);
        if (u >= kCacheFloor) {
            const auto cache = cache_for(k, alpha, settings);
            return (*cache)(std::log(u)) * std::pow(u, 1.0 - alpha);
        }
    }
    return w_recurse(k, z, alpha, settings);
}

double binom(int k, int j) {
    double v = 1.0;
    for (int i = 0; i < j; ++i) v = v * (k - i) / (i + 1);
    return v;
}

double factorial(int k) {
    double v = 1.0;
    for (int i = 2; i <= k; ++i) v *= i;
    return v;
}

}  // namespace

double W(int k, double z, double alpha, const QuadratureSettings& settings) {
    TailSpec::check_alpha(alpha);
    if (k < 0) throw DomainError("W: k must be >= 0");
    if (k == 0) return 1.0;
    if (z == static_cast<double>(k)) return 0.0;
    if (!(z > k - 1 && z < k))
        throw DomainError("W: z must lie in (k-1, k) for k >= 1");
    // Top-level calls use direct recursion (caches serve the inner levels),
    // so W(2,.) is a genuine quadrature cross-check of W2_closed.
    return w_recurse(k, z, alpha, settings);
}

double overlap_h(const WalkConfig& config, int k) {
    if (k < 1) throw DomainError("overlap_h: k must be >= 1");
    const double a = config.M / std::sqrt(static_cast<double>(config.n));
    const double slope = config.model.alpha() * k;
    double lo = 1e-8, hi = 0.25;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (normal_tail(mid * a) > slope * mid ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

Approximation approx_below(const WalkConfig& config, double x) {
    if (!(x > 0.0)) throw RangeError("approx_below: x must be positive");
    const double d = default_d(config);
    if (x > config.M - d)
        throw RangeError("approx_below: x exceeds M - d (Theorem 1 band)");
    const double nn = static_cast<double>(config.n);
    const double gauss = normal_tail(x / std::sqrt(nn));
    const double jump = x > std::sqrt(nn) ? nn * config.model.tail_V(x) : 0.0;
    Approximation a;
    a.k = 0;
    a.regime.tag = x <= kGaussianSplit * config.s_n ? Regime::Tag::Gaussian : Regime::Tag::BelowThreshold;
    a.terms = {{"gaussian", gauss}, {"single_jump", jump}};
    a.value = gauss + jump;
    return a;
}

Approximation approx_near_multiple(const WalkConfig& config, int k, double x, double eps) {
    if (k < 1) throw DomainError("approx_near_multiple: k must be >= 1");
    if (eps < 0.0) eps = default_eps(config);
    const double r = x / config.M;
    if (!(std::abs(r - k) <= eps))
        throw RangeError("approx_near_multiple: |x/M - k| exceeds eps");
    const double scale = std::pow(config.Pi_n, k) / factorial(k);
    const double z = x - k * config.M;
    const double nn = static_cast<double>(config.n);
    const double gauss = scale * normal_tail(z / std::sqrt(nn));
    const double jump = z > std::sqrt(nn) ? scale * nn * config.model.tail_V(z) : 0.0;
    Approximation a;
    a.k = k;
    a.regime.tag = Regime::Tag::NearMultiple;
    a.regime.k = k;
    a.regime.eps = eps;
    a.terms = {{"gaussian", gauss}, {"single_jump", jump}};
    a.value = gauss + jump;
    return a;
}

Approximation approx_interior(const WalkConfig& config, int k, double x, double h,
                              const QuadratureSettings& settings) {
    if (k < 1) throw DomainError("approx_interior: k must be >= 1");
    if (h < 0.0) h = default_h(config);
    const double r = x / config.M;
    if (!(r > k - 1 + h && r < k - h))
        throw RangeError("approx_interior: x/M outside (k-1+h, k-h)");
    const double alpha = config.model.alpha();
    const double scale = std::pow(config.Pi_n, k) / factorial(k);
    Approximation a;
    a.k = k;
    a.regime.tag = Regime::Tag::Interior;
    a.regime.k = k;
    a.regime.h = h;
    double sum = 0.0;
    for (int j = 0; j <= k; ++j) {
        const int m = k - j;
        const double z = r - j;
        double w;
        if (m == 0) {
            w = 1.0;
        } else if (z >= m) {
            w = 0.0;  // D_m empty above the right endpoint
        } else {
            w = W(m, z, alpha, settings);
        }
        const double term = scale * binom(k, j) * w;
        a.terms.emplace_back("j=" + std::to_string(j), term);
        sum += term;
    }
    a.value = sum;
    return a;
}

Regime classify_regime(const WalkConfig& config, double x, double eps, double h, int k_max) {
    if (!(h > 0.0 && h <= eps && eps <= 0.5))
        throw DomainError("classify_regime: requires 0 < h <= eps <= 1/2");
    if (!(x > 0.0)) throw DomainError("classify_regime: x must be positive");
    const double r = x / config.M;
    Regime reg;
    reg.eps = eps;
    reg.h = h;
    if (x <= (1.0 - eps) * config.M && x <= config.M - default_d(config)) {
        reg.tag = x <= kGaussianSplit * config.s_n ? Regime::Tag::Gaussian : Regime::Tag::BelowThreshold;
        return reg;
    }
    const int k_near = static_cast<int>(std::lround(r));
    if (k_near >= 1 && std::abs(r - k_near) <= eps) {
        if (k_near > k_max) throw RangeError("classify_regime: x beyond k_max band");
        reg.tag = Regime::Tag::NearMultiple;
        reg.k = k_near;
        return reg;
    }
    const int k_int = static_cast<int>(std::ceil(r));
    if (k_int > k_max) throw RangeError("classify_regime: x beyond k_max band");
    reg.tag = Regime::Tag::Interior;
    reg.k = k_int;
    return reg;
}

Approximation approx_auto(const WalkConfig& config, double x, double eps, double h, int k_max) {
    if (eps < 0.0) eps = default_eps(config);
    if (h < 0.0) h = std::min(default_h(config), eps);
    const Regime reg = classify_regime(config, x, eps, h, k_max);
    const double r = x / config.M;
    Approximation a;
    switch (reg.tag) {
        case Regime::Tag::Gaussian:
        case Regime::Tag::BelowThreshold: {
            a = approx_below(config, x);
            // k=1 interior formula carried as a diagnostic only (Theorem 3 is
            // proved for k >= 2; below the threshold H_n is the reported value).
            if (r > h && r < 1.0 - h) {
                const Approximation alt = approx_interior(config, 1, x, h);
                a.diagnostic = {"interior_k1", alt.value};
            }
            break;
        }
        case Regime::Tag::NearMultiple: {
            a = approx_near_multiple(config, reg.k, x, eps);
            if (r <= reg.k - h && r > reg.k - 1 + h) {
                const Approximation alt = approx_interior(config, reg.k, x, h);
                a.diagnostic = {"interior_k" + std::to_string(reg.k), alt.value};
            } else if (r >= reg.k + h && r < reg.k + 1 - h && reg.k + 1 <= k_max) {
                const Approximation alt = approx_interior(config, reg.k + 1, x, h);
                a.diagnostic = {"interior_k" + std::to_string(reg.k + 1), alt.value};
            }
            break;
        }
        case Regime::Tag::Interior: {
            a = approx_interior(config, reg.k, x, h);
            break;
        }
    }
    a.regime.eps = eps;
    a.regime.h = h;
    return a;
}

}  // namespace cldp
