#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace wedge {

inline constexpr double kPi = 3.14159265358979323846;

/// sin(x)/x with the removable singularity at 0.
inline double sinc(double x) {
    if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
    return std::sin(x) / x;
}

/// Raised when an iterative solver fails to meet its contract.
class SolverError : public std::runtime_error {
  public:
    explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

/// Eigensolver failure carrying the best iterate reached.
class EigensolverError : public SolverError {
  public:
    EigensolverError(const std::string& what, double best_value, double best_residual,
                     int iterations)
        : SolverError(what),
          best_value(best_value),
          best_residual(best_residual),
          iterations(iterations) {}

    double best_value;
    double best_residual;
    int iterations;
};

}  // namespace wedge
