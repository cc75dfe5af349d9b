#pragma once

// Large-deviation approximations for the censored sum Y_n = sum(xi_j ^ M_n):
// the scale s_n, the hybrid tail H_n, the simplex integrals W_k, the three
// regime formulas, and the dispatcher that partitions the x axis.

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cldp/distributions.hpp"
#include "cldp/errors.hpp"
#include "cldp/special.hpp"

namespace cldp {

// Dispatcher defaults. c splits Gaussian from single-jump reporting below
// the threshold; k_max caps the regime map.
inline constexpr double kGaussianSplit = 1.2;
inline constexpr int kDefaultKMax = 6;

struct WalkConfig {
    int64_t n = 0;
    double M = 0.0;
    JumpModel model;

    double s_n = 0.0;       // ((alpha-2) n ln n)^(1/2)
    double Pi_n = 0.0;      // n V(M_n)
    bool soft_warning = false;  // M / s_n < 3

    WalkConfig(int64_t n_, double M_, JumpModel model_) : n(n_), M(M_), model(std::move(model_)) {
        if (n < 2) throw DomainError("WalkConfig: n must be an integer >= 2");
        if (!(M > 0.0)) throw DomainError("WalkConfig: M must be > 0");
        s_n = std::sqrt((model.alpha() - 2.0) * static_cast<double>(n) * std::log(static_cast<double>(n)));
        Pi_n = static_cast<double>(n) * model.tail_V(M);
        if (!(Pi_n > 0.0 && Pi_n < 1.0))
            throw HardRegimeError("Pi_n = n V(M) = " + std::to_string(Pi_n) +
                                  " is outside (0,1); not in the soft-censoring regime");
        soft_warning = M / s_n < 3.0;
    }
};

inline double s_n(const WalkConfig& config) { return config.s_n; }

// H_n(z) = Phibar(z n^-1/2) + n V(z) 1{z > sqrt(n)}. Left-continuous at the
// indicator jump z = sqrt(n).
inline double capital_H(int64_t n, double z, const JumpModel& model) {
    if (n < 1) throw DomainError("capital_H: n must be >= 1");
    const double nn = static_cast<double>(n);
    double v = normal_tail(z / std::sqrt(nn));
    if (z > std::sqrt(nn)) v += nn * model.tail_V(z);
    return v;
}

// --- W_k family ------------------------------------------------------------

// Closed forms from the paper; the quadrature route in W() stays independent
// of these so the two can check each other.
inline double W1_closed(double z, double alpha) {
    if (!(z > 0.0 && z < 1.0)) throw DomainError("W1_closed: z must lie in (0,1)");
    return std::pow(z, -alpha) - 1.0;
}

inline double W2_closed(double z, double alpha) {
    if (!(z > 1.0 && z < 2.0)) throw DomainError("W2_closed: z must lie in (1,2)");
    QuadratureSettings tight;
    tight.abs_tol = 1e-14;
    tight.rel_tol = 1e-12;
    tight.max_subdivisions = 400;
    const double B = gen_incomplete_beta(1.0 - 1.0 / z, 1.0 / z, -alpha, 1.0 - alpha, tight);
    return 1.0 - std::pow(z - 1.0, -alpha) + alpha * std::pow(z, -2.0 * alpha) * B;
}

// W_k(z) for z in (k-1, k) by the recursion
//   W_k(z) = alpha int_{z-(k-1)}^1 W_{k-1}(z-t) t^(-alpha-1) dt,  W_0 == 1,
// evaluated with adaptive quadrature. Levels k-1 >= 2 are served from a
// 257-node Chebyshev cache (barycentric, log abscissa, the known
// (z-k+1)^(alpha-1) growth divided out); W_1 is integrated directly.
// At z == k the right-endpoint limit 0 is returned.
double W(int k, double z, double alpha, const QuadratureSettings& settings = {});

// --- regimes ---------------------------------------------------------------

struct Regime {
    enum class Tag { Gaussian, BelowThreshold, NearMultiple, Interior };
    Tag tag = Tag::Gaussian;
    int k = 0;  // meaningful for NearMultiple / Interior
    double eps = 0.0, h = 0.0;

    std::string name() const {
        switch (tag) {
            case Tag::Gaussian: return "Gaussian";
            case Tag::BelowThreshold: return "BelowThreshold";
            case Tag::NearMultiple: return "NearMultiple(" + std::to_string(k) + ")";
            case Tag::Interior: return "Interior(" + std::to_string(k) + ")";
        }
        return {};
    }
};

struct Approximation {
    double value = 0.0;
    Regime regime;
    int k = 0;
    std::vector<std::pair<std::string, double>> terms;
    // Alternative formula's value when x lies in an overlap band.
    std::optional<std::pair<std::string, double>> diagnostic;
};

// Band parameters. The spec's (ln n)^(-1/(alpha k_max)) floor exceeds 1/4
// for every representable n, so the default keeps only the h_prop scale
// 4 s_n / M, capped at 1/4.
inline double default_h(const WalkConfig& config) {
    return std::min(0.25, 4.0 * config.s_n / config.M);
}
inline double default_eps(const WalkConfig& config) { return std::min(0.5, 2.0 * default_h(config)); }

// Theorem 1 band slack: d = 4 (n ln n)^(1/2).
inline double default_d(const WalkConfig& config) {
    const double nn = static_cast<double>(config.n);
    return 4.0 * std::sqrt(nn * std::log(nn));
}

// Overlap bandwidth for transition diagnostics: the h balancing the two
// left-overlap error terms, Phibar(h M / sqrt(n)) = alpha k h (bisection;
// decreasing left side vs increasing right side).
double overlap_h(const WalkConfig& config, int k);

Approximation approx_below(const WalkConfig& config, double x);
Approximation approx_near_multiple(const WalkConfig& config, int k, double x,
                                   double eps = -1.0);
Approximation approx_interior(const WalkConfig& config, int k, double x, double h = -1.0,
                              const QuadratureSettings& settings = {});

Regime classify_regime(const WalkConfig& config, double x, double eps, double h,
                       int k_max = kDefaultKMax);

Approximation approx_auto(const WalkConfig& config, double x, double eps = -1.0, double h = -1.0,
                          int k_max = kDefaultKMax);

}  // namespace cldp
