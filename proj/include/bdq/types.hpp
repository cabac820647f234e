#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace bdq {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

/// Dimension mismatches and invalid sizes at API boundaries.
class DimensionError : public std::invalid_argument {
 public:
  explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

/// Violations of manifold membership or tangent-vector contracts.
class ManifoldError : public std::runtime_error {
 public:
  explicit ManifoldError(const std::string& what) : std::runtime_error(what) {}
};

/// Iterative method failed to reach its tolerance; carries the best iterate.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double value, ComplexVector left,
                   ComplexVector right, double residual, int iterations)
      : std::runtime_error(what),
        value(value),
        left(std::move(left)),
        right(std::move(right)),
        residual(residual),
        iterations(iterations) {}

  double value;
  ComplexVector left;
  ComplexVector right;
  double residual;
  int iterations;
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw DimensionError(what);
}

inline void require_finite(const ComplexVector& v, const char* name) {
  if (!v.allFinite()) throw DimensionError(std::string(name) + ": non-finite entries");
}

}  // namespace bdq
