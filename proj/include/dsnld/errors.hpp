#ifndef DSNLD_ERRORS_HPP
#define DSNLD_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace dsnld {

/// Malformed or inconsistent time grid (empty, non-monotone, wrong origin).
struct InvalidGridError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Step or node index outside the valid range.
struct IndexError : std::out_of_range {
  using std::out_of_range::out_of_range;
};

/// Argument outside the mathematical domain of an operation.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

/// Non-finite value encountered where a finite one is required.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Two fields that must share a grid do not.
struct GridMismatchError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Importance weights degenerated below the configured floor.
struct EssCollapseError : std::runtime_error {
  double ess;
  double floor;
  double time;
  EssCollapseError(double ess_, double floor_, double time_)
      : std::runtime_error("effective sample size collapsed: ESS=" + std::to_string(ess_) +
                           " < floor=" + std::to_string(floor_) + " at t=" + std::to_string(time_)),
        ess(ess_), floor(floor_), time(time_) {}
};

/// Mass reached the edge of the periodic box; the run is not trustworthy.
struct DomainTooSmallError : std::runtime_error {
  double boundary_fraction;
  double time;
  DomainTooSmallError(double frac, double time_)
      : std::runtime_error("boundary mass fraction " + std::to_string(frac) +
                           " exceeded tolerance at t=" + std::to_string(time_) +
                           "; enlarge the spatial box"),
        boundary_fraction(frac), time(time_) {}
};

/// Configuration file problem: unknown field, missing seed, mismatched grids.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Output writing failure.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace dsnld

#endif
