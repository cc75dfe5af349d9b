#pragma once

#include <stdexcept>
#include <string>

namespace cldp {

// Invalid argument to a formula or sampler (precondition violated).
class DomainError : public std::domain_error {
  public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// Argument outside the regime band a theorem formula is valid on.
class RangeError : public std::out_of_range {
  public:
    explicit RangeError(const std::string& what) : std::out_of_range(what) {}
};

// Quadrature could not reach the requested tolerance. Always fatal:
// downstream comparisons are meaningless with unknown quadrature error.
class ConvergenceError : public std::runtime_error {
  public:
    explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

// Pi_n = n V(M_n) outside (0,1): the walk is not in the soft-censoring regime.
class HardRegimeError : public std::runtime_error {
  public:
    explicit HardRegimeError(const std::string& what) : std::runtime_error(what) {}
};

// Stratum weights vanished even in log space.
class StratumOverflow : public std::runtime_error {
  public:
    explicit StratumOverflow(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cldp
