#include "cldp/simulation.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <thread>

namespace cldp {

namespace {

double log_binom_weight(int64_t n, int j, double log_vy, double log_1m_vy) {
    return std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(j) + 1.0) -
           std::lgamma(static_cast<double>(n - j) + 1.0) + j * log_vy + (n - j) * log_1m_vy;
}

// (n V(y))^(k+1) / (k+1)! in log space.
double tail_strata_bound(int64_t n, double vy, int k_cap) {
    const double lw = (k_cap + 1) * (std::log(static_cast<double>(n)) + std::log(vy)) -
                      std::lgamma(static_cast<double>(k_cap) + 2.0);
    return std::exp(lw);
}

struct StratumCounts {
    std::vector<int64_t> hits;       // per threshold
    std::vector<int64_t> cens_hits;  // per threshold, all j jumps > M
};

// Core walk sampler for stratum j: exact conditional draws, censoring at M
// (M = +inf turns censoring off). Deterministic in (seed, ctx, j, i).
void run_stratum(const JumpModel& model, int64_t n, double M, double y, int j, int64_t samples,
                 uint64_t seed, StreamContext ctx, std::span<const double> xs, int workers,
                 StratumCounts& out) {
    const ConditionedSampler above(model, y, ConditionedSampler::Side::Above);
    const ConditionedSampler below(model, y, ConditionedSampler::Side::Below);
    const size_t nx = xs.size();

    auto worker = [&](int64_t lo, int64_t hi, StratumCounts& acc) {
        for (int64_t i = lo; i < hi; ++i) {
            RngStream rs(seed, ctx, static_cast<uint32_t>(j), static_cast<uint64_t>(i));
            double sum = 0.0;
            bool all_censored = j > 0;
#ifndef NDEBUG
            double raw_sum = 0.0;
#endif
            for (int t = 0; t < j; ++t) {
                const double xi = above.from_uniform(rs.next_u01());
                if (xi <= M) all_censored = false;
                sum += std::min(xi, M);
#ifndef NDEBUG
                raw_sum += xi;
#endif
            }
            for (int64_t t = j; t < n; ++t) {
                const double xi = below.from_uniform(rs.next_u01());
                sum += std::min(xi, M);
#ifndef NDEBUG
                raw_sum += xi;
#endif
            }
#ifndef NDEBUG
            assert(sum <= raw_sum * (1.0 + 1e-12) + 1e-9);
            assert(M == std::numeric_limits<double>::infinity() || sum <= static_cast<double>(n) * M);
#endif
            for (size_t q = 0; q < nx; ++q) {
                if (sum > xs[q]) {
                    ++acc.hits[q];
                    if (all_censored) ++acc.cens_hits[q];
                }
            }
        }
    };

    out.hits.assign(nx, 0);
    out.cens_hits.assign(nx, 0);
    if (workers <= 1) {
        worker(0, samples, out);
        return;
    }
    std::vector<StratumCounts> parts(workers);
    std::vector<std::thread> threads;
    const int64_t block = (samples + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        parts[w].hits.assign(nx, 0);
        parts[w].cens_hits.assign(nx, 0);
        const int64_t lo = w * block, hi = std::min<int64_t>(samples, lo + block);
        if (lo >= hi) continue;
        threads.emplace_back(worker, lo, hi, std::ref(parts[w]));
    }
    for (auto& t : threads) t.join();
    for (const auto& p : parts)
        for (size_t q = 0; q < nx; ++q) {
            out.hits[q] += p.hits[q];
            out.cens_hits[q] += p.cens_hits[q];
        }
}

std::vector<Estimate> stratified_core(const JumpModel& model, int64_t n, double M, double y,
                                      std::span<const double> xs, const MCConfig& mc, StreamContext ctx) {
    mc.validate();
    model.require_samplable();
    const double vy = model.tail_V(y);
    if (!(vy > 0.0 && vy < 1.0))
        throw DomainError("stratification threshold has V(y) outside (0,1)");
    const double log_vy = std::log(vy), log_1m_vy = std::log1p(-vy);
    const int k_cap = static_cast<int>(std::min<int64_t>(mc.k_cap, n));
    const size_t nx = xs.size();

    std::vector<Estimate> out(nx);
    for (auto& e : out) {
        e.method = Estimate::Method::Stratified;
        e.bias_bound = tail_strata_bound(n, vy, k_cap);
    }

    double max_weight = 0.0;
    for (int j = 0; j <= k_cap; ++j) {
        const double w = std::exp(log_binom_weight(n, j, log_vy, log_1m_vy));
        max_weight = std::max(max_weight, w);
        StratumCounts counts;
        run_stratum(model, n, M, y, j, mc.samples, mc.seed, ctx, xs, mc.workers, counts);
        const double ns = static_cast<double>(mc.samples);
        for (size_t q = 0; q < nx; ++q) {
            const double p = static_cast<double>(counts.hits[q]) / ns;
            const double se = std::sqrt(p * (1.0 - p) / ns);
            StratumStat st;
            st.j = j;
            st.weight = w;
            st.cond_p = p;
            st.cond_se = se;
            st.hits = counts.hits[q];
            st.censored_hit_fraction =
                counts.hits[q] > 0 ? static_cast<double>(counts.cens_hits[q]) / counts.hits[q] : 0.0;
            out[q].strata.push_back(st);
            out[q].p_hat += w * p;
            out[q].std_err += w * w * se * se;
        }
    }
    if (max_weight == 0.0)
        throw StratumOverflow("all stratum weights underflowed to zero");
    for (auto& e : out) e.std_err = std::sqrt(e.std_err);
    return out;
}

}  // namespace

Estimate estimate_plain(const WalkConfig& config, double x, const MCConfig& mc) {
    mc.validate();
    config.model.require_samplable();
    const int64_t n = config.n;
    const double M = config.M;
    const double ns = static_cast<double>(mc.samples);

    std::vector<int64_t> hits(std::max(mc.workers, 1), 0);
    auto worker = [&](int64_t lo, int64_t hi, int64_t& acc) {
        for (int64_t i = lo; i < hi; ++i) {
            RngStream rs(mc.seed, StreamContext::Plain, 0, static_cast<uint64_t>(i));
            double sum = 0.0;
            for (int64_t t = 0; t < n; ++t) sum += std::min(config.model.from_uniform(rs.next_u01()), M);
            if (sum > x) ++acc;
        }
    };
    if (mc.workers <= 1) {
        worker(0, mc.samples, hits[0]);
    } else {
        std::vector<std::thread> threads;
        const int64_t block = (mc.samples + mc.workers - 1) / mc.workers;
        for (int w = 0; w < mc.workers; ++w) {
            const int64_t lo = w * block, hi = std::min<int64_t>(mc.samples, lo + block);
            if (lo < hi) threads.emplace_back(worker, lo, hi, std::ref(hits[w]));
        }
        for (auto& t : threads) t.join();
    }
    int64_t total = 0;
    for (int64_t h : hits) total += h;
    Estimate e;
    e.method = Estimate::Method::Plain;
    e.p_hat = static_cast<double>(total) / ns;
    e.std_err = std::sqrt(e.p_hat * (1.0 - e.p_hat) / ns);
    return e;
}

Estimate estimate_stratified(const WalkConfig& config, double x, const MCConfig& mc) {
    const double xs[1] = {x};
    return stratified_core(config.model, config.n, config.M, mc.y_factor * config.M, xs, mc,
                           StreamContext::Stratified)[0];
}

std::vector<Estimate> estimate_stratified_sweep(const WalkConfig& config, std::span<const double> xs,
                                                const MCConfig& mc) {
    return stratified_core(config.model, config.n, config.M, mc.y_factor * config.M, xs, mc,
                           StreamContext::Stratified);
}

OracleResult oracle_W_simplex(int k, double z, double alpha, int64_t samples, uint64_t seed) {
    TailSpec::check_alpha(alpha);
    if (k < 1) throw DomainError("oracle_W_simplex: k must be >= 1");
    if (!(z > k - 1 && z < k)) throw DomainError("oracle_W_simplex: z must lie in (k-1, k)");
    if (samples < 1) throw DomainError("oracle_W_simplex: samples must be >= 1");

    // Tight per-coordinate support: on D_k(z) every t_i exceeds z-(k-1), so
    // restricting the proposal there keeps the estimator exactly unbiased.
    const double t_min = std::max(1e-6, z - (k - 1));
    const double tma = std::pow(t_min, -alpha);
    const double Z = tma - 1.0;  // normalization of alpha t^(-alpha-1) on (t_min, 1)
    const double neg_inv_alpha = -1.0 / alpha;

    int64_t hits = 0;
    for (int64_t i = 0; i < samples; ++i) {
        RngStream rs(seed, StreamContext::SimplexOracle, static_cast<uint32_t>(k), static_cast<uint64_t>(i));
        double sum = 0.0;
        for (int c = 0; c < k; ++c) sum += std::pow(tma - rs.next_u01() * Z, neg_inv_alpha);
        if (sum > z) ++hits;
    }
    const double p = static_cast<double>(hits) / static_cast<double>(samples);
    const double wk = std::pow(Z, k);
    OracleResult r;
    r.value = wk * p;
    r.std_err = wk * std::sqrt(p * (1.0 - p) / static_cast<double>(samples));
    // Mass of D_k(z) with some coordinate below t_min; zero unless the 1e-6
    // floor was the binding choice of t_min.
    const double lo = z - (k - 1);
    if (t_min > lo) {
        const double other = std::pow(lo, -alpha);
        r.truncation_bias_bound = k * (std::pow(lo, -alpha) - tma) * std::pow(other, k - 1);
    }
    return r;
}

Estimate simulate_uncensored_tail(int64_t n, double x, const JumpModel& model, const MCConfig& mc) {
    if (n < 1) throw DomainError("simulate_uncensored_tail: n must be >= 1");
    const double y = std::max(x / 2.0, 2.0 * std::sqrt(static_cast<double>(n)));
    const double xs[1] = {x};
    return stratified_core(model, n, std::numeric_limits<double>::infinity(), y, xs, mc,
                           StreamContext::Uncensored)[0];
}

}  // namespace cldp
