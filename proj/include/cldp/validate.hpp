#pragma once

// The acceptance battery: every criterion the project is judged by, runnable
// from the CLI (`validate`) and from the acceptance test binary. Criteria
// involving Monte Carlo honor (samples, seed, workers); formula criteria are
// deterministic.

#include <cstdint>
#include <string>
#include <vector>

#include "cldp/simulation.hpp"

namespace cldp {

struct CriterionResult {
    enum class Status { Pass, Fail, Skip };
    std::string id;
    std::string name;
    Status status = Status::Skip;
    std::string detail;
    double seconds = 0.0;
};

struct ValidationOptions {
    int64_t n = 10000;
    double M = 3000.0;
    double alpha = 3.0;
    int64_t samples = 100000;  // per stratum
    uint64_t seed = kDefaultSeed;
    int workers = 1;
    bool quick = false;  // W-function checks only
};

std::vector<CriterionResult> run_validation(const ValidationOptions& options);

// 0 if everything passed (skips allowed), 1 otherwise.
int validation_exit_code(const std::vector<CriterionResult>& results);

std::string format_results(const std::vector<CriterionResult>& results);

}  // namespace cldp
