#pragma once

// Output schemas shared by the CLI subcommands. Every run echoes its fully
// resolved parameters; reals print with 17 significant digits so they
// re-parse bit-exactly.

#include <optional>
#include <string>
#include <vector>

#include "cldp/asymptotics.hpp"
#include "cldp/simulation.hpp"

namespace cldp {

// Resolved parameters of a run, echoed into every output.
struct RunMeta {
    std::string jump_spec;
    int64_t n = 0;
    double M = 0.0;
    double alpha = 0.0;
    double s_n = 0.0;
    double Pi_n = 0.0;
    double eps = 0.0;
    double h = 0.0;
    double d = 0.0;
    uint64_t seed = 0;
    double y_factor = 0.0;
    int64_t samples = 0;
    int k_cap = 0;
    int workers = 0;
    bool soft_censoring_warning = false;
};

RunMeta make_meta(const WalkConfig& config, const std::string& jump_spec, const MCConfig& mc,
                  double eps, double h);

std::string format_real(double v);  // %.17g

// Fixed sweep schema: x, x_over_M, regime, k, value, term_0..term_6,
// diagnostic, then optional mc_p, mc_se, bias_bound.
extern const char* const kSweepHeaderBase;
extern const char* const kSweepHeaderMC;

std::string sweep_csv_row(double x, double M, const Approximation& a, const Estimate* mc);
std::string meta_csv_comment(const RunMeta& m);

std::string approx_json(const RunMeta& m, const Approximation& a);
std::string estimate_json(const RunMeta& m, double x, const Estimate& e);

}  // namespace cldp
