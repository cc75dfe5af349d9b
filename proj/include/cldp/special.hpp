#pragma once

// Scalar special functions and the adaptive quadrature the W_k recursion
// rests on. The quadrature is a plain Gauss-Kronrod 7/15 bisection scheme
// with the panel error taken as |K15 - G7|; an optional power-law stretch
// of the lower endpoint tames integrands that grow like t^(-a-1) there.

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include "cldp/errors.hpp"

namespace cldp {

struct QuadratureSettings {
    double abs_tol = 1e-10;
    double rel_tol = 1e-8;
    int max_subdivisions = 200;
    // > 1 substitutes t = lo + (hi-lo) v^p so nodes cluster at the lower
    // endpoint; set from the known integrand exponent (p = alpha + 1).
    double lower_stretch_power = 1.0;

    void validate() const {
        if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) throw DomainError("quadrature tolerances must be > 0");
        if (max_subdivisions < 10) throw DomainError("max_subdivisions must be >= 10");
    }
};

struct QuadResult {
    double value = 0.0;
    double error_estimate = 0.0;
    int subdivisions_used = 0;
};

// Standard normal upper tail via the complementary error function.
inline double normal_tail(double z) {
    return 0.5 * std::erfc(z * 0.7071067811865475244);
}

inline double normal_density(double z) {
    return 0.3989422804014326779 * std::exp(-0.5 * z * z);
}

namespace detail {

// Kronrod 15 abscissae on [0,1] side (QUADPACK dqk15) plus weights.
inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F>
inline void gk15(const F& f, double a, double b, double& value, double& err) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    const double fc = f(c);
    double resk = kWgk[7] * fc;
    double resg = kWg[3] * fc;
    for (int i = 0; i < 7; ++i) {
        const double dx = h * kXgk[i];
        const double fs = f(c - dx) + f(c + dx);
        resk += kWgk[i] * fs;
        if (i % 2 == 1) resg += kWg[i / 2] * fs;
    }
    value = resk * h;
    err = std::abs((resk - resg) * h);
}

template <class F>
QuadResult adaptive_gk(const F& f, double lo, double hi, const QuadratureSettings& s) {
    struct Panel {
        double err, a, b, value;
        bool operator<(const Panel& o) const { return err < o.err; }
    };
    std::priority_queue<Panel> heap;
    double v0, e0;
    gk15(f, lo, hi, v0, e0);
    heap.push({e0, lo, hi, v0});
    double total_v = v0, total_e = e0;
    int used = 1;
    while (total_e > std::max(s.abs_tol, s.rel_tol * std::abs(total_v)) && used < s.max_subdivisions) {
        const Panel p = heap.top();
        heap.pop();
        const double mid = 0.5 * (p.a + p.b);
        double vl, el, vr, er;
        gk15(f, p.a, mid, vl, el);
        gk15(f, mid, p.b, vr, er);
        total_v += vl + vr - p.value;
        total_e += el + er - p.err;
        heap.push({el, p.a, mid, vl});
        heap.push({er, mid, p.b, vr});
        ++used;
    }
    if (total_e > std::max(s.abs_tol, s.rel_tol * std::abs(total_v))) {
        throw ConvergenceError("adaptive quadrature did not converge: error " + std::to_string(total_e) +
                               " on value " + std::to_string(total_v) + " after " + std::to_string(used) +
                               " subdivisions");
    }
    return {total_v, total_e, used};
}

}  // namespace detail

template <class F>
QuadResult integrate_adaptive(const F& f, double lo, double hi, const QuadratureSettings& settings = {}) {
    settings.validate();
    if (!(lo < hi)) throw DomainError("integrate_adaptive: requires lo < hi");
    if (settings.lower_stretch_power > 1.0) {
        const double p = settings.lower_stretch_power, len = hi - lo;
        auto g = [&](double v) {
            const double vp = std::pow(v, p - 1.0);
            return f(lo + len * vp * v) * p * vp * len;
        };
        QuadratureSettings inner = settings;
        inner.lower_stretch_power = 1.0;
        return detail::adaptive_gk(g, 0.0, 1.0, inner);
    }
    return detail::adaptive_gk(f, lo, hi, settings);
}

// B(z1, z2; a, b) = int_{z1}^{z2} t^(a-1) (1-t)^(b-1) dt on 0 < z1 < z2 < 1.
// a and b may be negative; both endpoints stay inside (0,1) so the integrand
// is finite and direct quadrature applies.
inline double gen_incomplete_beta(double z1, double z2, double a, double b,
                                  const QuadratureSettings& settings = {}) {
    if (!(0.0 < z1 && z1 < z2 && z2 < 1.0))
        throw DomainError("gen_incomplete_beta: requires 0 < z1 < z2 < 1");
    auto f = [a, b](double t) { return std::pow(t, a - 1.0) * std::pow(1.0 - t, b - 1.0); };
    return integrate_adaptive(f, z1, z2, settings).value;
}

}  // namespace cldp
