#include <cmath>
#include <vector>

#include "cldp/simulation.hpp"
#include "doctest.h"

using namespace cldp;

namespace {

const JumpModel kPareto3 = make_standardized_pareto(3.0);

MCConfig quick_mc(int64_t samples = 20000, double y_factor = 0.25, int k_cap = 4) {
    MCConfig mc;
    mc.samples = samples;
    mc.seed = 555;
    mc.y_factor = y_factor;
    mc.k_cap = k_cap;
    return mc;
}

}  // namespace

TEST_CASE("plain estimator degenerate thresholds") {
    const WalkConfig c(50, 40.0, kPareto3);
    MCConfig mc = quick_mc(2000);
    const Estimate certain = estimate_plain(c, -1e9, mc);
    CHECK(certain.p_hat == 1.0);
    CHECK(certain.std_err == 0.0);
    // Y_n <= n M always
    const Estimate never = estimate_plain(c, 50 * 40.0 + 1.0, mc);
    CHECK(never.p_hat == 0.0);
}

TEST_CASE("plain estimator vs uncensored-sum oracle") {
    // M so large that censoring is inactive: P(Y > 0) should match an
    // independently coded plain-sum simulation of S_n.
    const int64_t n = 100;
    const WalkConfig c(n, 1e6, kPareto3);
    MCConfig mc = quick_mc(50000);
    const Estimate e = estimate_plain(c, 0.0, mc);

    int hits = 0;
    const int oracle_n = 50000;
    for (int i = 0; i < oracle_n; ++i) {
        RngStream rs(777, StreamContext::Aux, 5, static_cast<uint64_t>(i));
        double s = 0.0;
        for (int64_t t = 0; t < n; ++t) s += kPareto3.sample(rs);
        if (s > 0.0) ++hits;
    }
    const double p_oracle = static_cast<double>(hits) / oracle_n;
    const double se = std::sqrt(p_oracle * (1.0 - p_oracle) / oracle_n + e.std_err * e.std_err);
    CHECK(std::abs(e.p_hat - p_oracle) <= 3.0 * se);
}

TEST_CASE("stratified agrees with plain across parameter sets") {
    // deterministic pseudo-random parameter draws
    RngStream prs(99, StreamContext::Aux, 77, 0);
    for (int trial = 0; trial < 10; ++trial) {
        const int64_t n = 50 + static_cast<int64_t>(prs.next_u01() * 300);
        const double M = 30.0 + prs.next_u01() * 100.0;
        // x where plain MC still sees plenty of hits
        const double x = prs.next_u01() * std::min(0.4 * M, 2.5 * std::sqrt(static_cast<double>(n)));
        const double yf = 0.1 + prs.next_u01() * 0.5;
        const WalkConfig c(n, M, kPareto3);
        MCConfig mc = quick_mc(30000, yf);
        mc.seed = 1000 + trial;
        const Estimate strat = estimate_stratified(c, x, mc);
        const Estimate plain = estimate_plain(c, x, mc);
        const double se = std::sqrt(strat.std_err * strat.std_err + plain.std_err * plain.std_err);
        CAPTURE(n);
        CAPTURE(M);
        CAPTURE(x);
        CAPTURE(yf);
        CHECK(std::abs(strat.p_hat - plain.p_hat) <= 3.0 * se + 1e-12);
    }
}

TEST_CASE("stratified estimator structure") {
    const WalkConfig c(400, 60.0, kPareto3);
    MCConfig mc = quick_mc(20000);
    const Estimate e = estimate_stratified(c, 30.0, mc);
    CHECK(e.method == Estimate::Method::Stratified);
    REQUIRE(e.strata.size() == 5);

    // p_hat is exactly the weighted stratum sum, weights binomial
    double p = 0.0, wsum = 0.0, var = 0.0;
    for (const auto& s : e.strata) {
        p += s.weight * s.cond_p;
        wsum += s.weight;
        var += s.weight * s.weight * s.cond_se * s.cond_se;
        CHECK(s.cond_p >= 0.0);
        CHECK(s.cond_p <= 1.0);
    }
    CHECK(e.p_hat == p);
    CHECK(e.std_err == doctest::Approx(std::sqrt(var)).epsilon(1e-14));
    CHECK(e.p_hat >= 0.0);
    CHECK(e.p_hat <= 1.0);

    // binomial completeness: sampled weights + remainder bound cover 1
    CHECK(wsum + e.bias_bound >= 1.0 - 1e-12);

    // remainder bound at the desk scale and default y_factor
    const WalkConfig desk(10000, 3000.0, kPareto3);
    MCConfig mcd;
    mcd.samples = 1000;
    mcd.seed = 3;
    const Estimate ed = estimate_stratified(desk, 1500.0, mcd);
    CHECK(ed.bias_bound < 1e-12);
}

TEST_CASE("determinism across worker counts") {
    const WalkConfig c(300, 50.0, kPareto3);
    for (double x : {10.0, 45.0}) {
        std::vector<Estimate> runs;
        for (int workers : {1, 3, 8}) {
            MCConfig mc = quick_mc(9000);
            mc.workers = workers;
            runs.push_back(estimate_stratified(c, x, mc));
        }
        CHECK(runs[0].p_hat == runs[1].p_hat);
        CHECK(runs[0].p_hat == runs[2].p_hat);
        CHECK(runs[0].std_err == runs[2].std_err);
        for (size_t j = 0; j < runs[0].strata.size(); ++j)
            CHECK(runs[0].strata[j].hits == runs[2].strata[j].hits);
    }
    // plain path too
    MCConfig mc1 = quick_mc(9000);
    MCConfig mc8 = quick_mc(9000);
    mc8.workers = 8;
    CHECK(estimate_plain(c, 20.0, mc1).p_hat == estimate_plain(c, 20.0, mc8).p_hat);
}

TEST_CASE("sweep is consistent with single calls and monotone") {
    const WalkConfig c(200, 80.0, kPareto3);
    MCConfig mc = quick_mc(15000);
    const std::vector<double> xs = {5.0, 20.0, 40.0, 90.0, 130.0};
    const auto sweep = estimate_stratified_sweep(c, xs, mc);
    REQUIRE(sweep.size() == xs.size());
    for (size_t i = 0; i < xs.size(); ++i) {
        const Estimate single = estimate_stratified(c, xs[i], mc);
        CHECK(sweep[i].p_hat == single.p_hat);
        CHECK(sweep[i].std_err == single.std_err);
    }
    // shared walks make the sweep exactly nonincreasing in x
    for (size_t i = 1; i < sweep.size(); ++i) CHECK(sweep[i].p_hat <= sweep[i - 1].p_hat);
}

TEST_CASE("stratum domination near multiples of M") {
    // at x = k M with M/s_n = 30 the all-censored part of stratum k carries
    // the estimate (k in {1,2})
    const int64_t n = 2000;
    const double s = std::sqrt(static_cast<double>(n) * std::log(static_cast<double>(n)));
    const WalkConfig c(n, 30.0 * s, kPareto3);
    MCConfig mc = quick_mc(20000, 0.5, 4);
    for (int k : {1, 2}) {
        const Estimate e = estimate_stratified(c, k * c.M, mc);
        const auto& s_k = e.strata[k];
        const double share = s_k.weight * s_k.cond_p * s_k.censored_hit_fraction / e.p_hat;
        CAPTURE(k);
        CHECK(share >= 0.80);
    }
}

TEST_CASE("stratified input validation") {
    const WalkConfig c(100, 50.0, kPareto3);
    MCConfig mc = quick_mc();
    mc.samples = 10;
    CHECK_THROWS_AS(estimate_stratified(c, 10.0, mc), DomainError);
    mc = quick_mc();
    mc.y_factor = 1.5;
    CHECK_THROWS_AS(estimate_stratified(c, 10.0, mc), DomainError);
    mc = quick_mc();
    mc.workers = 0;
    CHECK_THROWS_AS(estimate_stratified(c, 10.0, mc), DomainError);
}

TEST_CASE("simplex oracle") {
    // k=1 is exact: Z * 1, zero variance
    const auto o1 = oracle_W_simplex(1, 0.5, 3.0, 1000, 11);
    CHECK(o1.value == doctest::Approx(7.0).epsilon(1e-12));
    CHECK(o1.std_err == 0.0);
    CHECK(o1.truncation_bias_bound == 0.0);

    // k=2 against the closed form
    const double w2 = 6.2313925560359;  // W2_closed(1.5, 3)
    const auto o2 = oracle_W_simplex(2, 1.5, 3.0, 2000000, 12);
    CHECK(std::abs(o2.value - w2) <= 3.0 * o2.std_err);
    CHECK(o2.std_err < 0.05);

    // z near k: empty-simplex limit
    const auto oz = oracle_W_simplex(2, 1.999, 3.0, 100000, 13);
    CHECK(oz.value < 1e-4);

    CHECK_THROWS_AS(oracle_W_simplex(2, 2.5, 3.0, 1000, 1), DomainError);
    CHECK_THROWS_AS(oracle_W_simplex(0, 0.5, 3.0, 1000, 1), DomainError);
}

TEST_CASE("uncensored tail simulation") {
    const int64_t n = 10000;
    MCConfig mc = quick_mc(30000, 0.25, 2);

    // x = 0: CLT gives 1/2 up to skew; 0.02 absolute allowance
    const Estimate e0 = simulate_uncensored_tail(n, 0.0, kPareto3, mc);
    CHECK(std::abs(e0.p_hat - 0.5) < 0.02);

    // x = 0.5 sqrt(n): vs Phibar(0.5)
    mc.samples = 10000;
    const Estimate eg = simulate_uncensored_tail(n, 0.5 * std::sqrt(static_cast<double>(n)), kPareto3, mc);
    CHECK(std::abs(eg.p_hat - 0.3085) < 0.02);

    // x = 2 s_n: single-jump zone, estimate / nV(x) within the finite-n band
    mc.samples = 5000;
    const double s = std::sqrt(static_cast<double>(n) * std::log(static_cast<double>(n)));
    const Estimate ej = simulate_uncensored_tail(n, 2.0 * s, kPareto3, mc);
    const double nv = static_cast<double>(n) * tail_V(kPareto3, 2.0 * s);
    CHECK(ej.p_hat / nv >= 0.8);
    CHECK(ej.p_hat / nv <= 1.25);
}

TEST_CASE("censoring caps every sampled walk") {
    // behavioral version of the Y_n <= n M invariant
    const WalkConfig c(30, 5.0, kPareto3);
    MCConfig mc = quick_mc(5000);
    const Estimate e = estimate_plain(c, 30.0 * 5.0, mc);
    CHECK(e.p_hat == 0.0);
    const Estimate e2 = estimate_stratified(c, 30.0 * 5.0, mc);
    CHECK(e2.p_hat == 0.0);
}
