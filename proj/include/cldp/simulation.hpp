#pragma once

// Monte Carlo estimators for P(Y_n > x): a plain frequency estimator and an
// exact-stratification estimator over the number of jumps above a threshold
// y, with the conditional law inside each stratum sampled exactly (j draws
// conditioned above y, n-j conditioned below, censoring applied per term).
// Strata beyond k_cap are not sampled; their total mass is bounded
// analytically by (n V(y))^(k_cap+1) / (k_cap+1)! and reported as bias_bound.
//
// Randomness is counter-based: stream = (context, stratum, sample index),
// every sample consumes exactly n uniforms, so results are bit-identical
// for any worker count.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cldp/asymptotics.hpp"
#include "cldp/distributions.hpp"

namespace cldp {

inline constexpr uint64_t kDefaultSeed = 20231104ull;

struct MCConfig {
    int64_t samples = 100000;  // per stratum
    uint64_t seed = kDefaultSeed;
    double y_factor = 0.1;  // stratification threshold y = y_factor * M
    int k_cap = kDefaultKMax + 2;
    int workers = 1;

    void validate() const {
        if (samples < 1000) throw DomainError("MCConfig: samples must be >= 1000");
        if (!(y_factor > 0.0 && y_factor < 1.0)) throw DomainError("MCConfig: y_factor must be in (0,1)");
        if (k_cap < 0) throw DomainError("MCConfig: k_cap must be >= 0");
        if (workers < 1) throw DomainError("MCConfig: workers must be >= 1");
    }
};

struct StratumStat {
    int j = 0;
    double weight = 0.0;       // P(nu_n(y) = j), exact binomial point mass
    double cond_p = 0.0;       // estimated P(Y_n > x | nu_n(y) = j)
    double cond_se = 0.0;
    int64_t hits = 0;
    // Fraction of hits in which all j large jumps exceeded M (all censored).
    double censored_hit_fraction = 0.0;
};

struct Estimate {
    enum class Method { Plain, Stratified };
    double p_hat = 0.0;
    double std_err = 0.0;
    double bias_bound = 0.0;  // unsampled-strata remainder, 0 for Plain
    Method method = Method::Plain;
    std::vector<StratumStat> strata;
};

Estimate estimate_plain(const WalkConfig& config, double x, const MCConfig& mc);

Estimate estimate_stratified(const WalkConfig& config, double x, const MCConfig& mc);

// One pass over the walks serving many thresholds; element i is bit-identical
// to estimate_stratified(config, xs[i], mc).
std::vector<Estimate> estimate_stratified_sweep(const WalkConfig& config, std::span<const double> xs,
                                                const MCConfig& mc);

// Importance-sampling MC for W_k(z): coordinates drawn from the normalized
// density alpha t^(-alpha-1) on (t_min, 1), t_min = max(1e-6, z-k+1).
struct OracleResult {
    double value = 0.0;
    double std_err = 0.0;
    double truncation_bias_bound = 0.0;
};
OracleResult oracle_W_simplex(int k, double z, double alpha, int64_t samples, uint64_t seed);

// Uncensored-sum tail P(S_n > x) by the same stratified machinery. The
// stratification threshold is y = max(x/2, 2 sqrt(n)) (there is no M to tie
// y_factor to).
Estimate simulate_uncensored_tail(int64_t n, double x, const JumpModel& model, const MCConfig& mc);

}  // namespace cldp
