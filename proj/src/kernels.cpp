#include "bdq/kernels.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace bdq::kernels {

namespace {
constexpr Eigen::Index kParallelCutoff = 1 << 14;  // flop count below which threading never pays
constexpr Eigen::Index kChunk = 1024;
}  // namespace

bool& use_parallel() {
  static bool enabled = true;
  return enabled;
}

void cgemv_serial(const ComplexMatrix& a, const ComplexVector& x, ComplexVector& y) {
  require(a.cols() == x.size(), "cgemv: dimension mismatch");
  y.resize(a.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    Complex acc = 0.0;
    for (Eigen::Index j = 0; j < a.cols(); ++j) acc += a(i, j) * x[j];
    y[i] = acc;
  }
}

void cgemv_parallel(const ComplexMatrix& a, const ComplexVector& x, ComplexVector& y) {
  require(a.cols() == x.size(), "cgemv: dimension mismatch");
  const Eigen::Index rows = a.rows();
  y.resize(rows);
#pragma omp parallel for schedule(static) if (rows * a.cols() > kParallelCutoff)
  for (Eigen::Index i = 0; i < rows; ++i) {
    y[i] = a.row(i).conjugate().dot(x);  // dot conjugates its first argument
  }
}

void cgemv(const ComplexMatrix& a, const ComplexVector& x, ComplexVector& y) {
  if (use_parallel())
    cgemv_parallel(a, x, y);
  else
    cgemv_serial(a, x, y);
}

void cgemv_adjoint_serial(const ComplexMatrix& a, const ComplexVector& w, ComplexVector& out) {
  require(a.rows() == w.size(), "cgemv_adjoint: dimension mismatch");
  out.resize(a.cols());
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    Complex acc = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i) acc += std::conj(a(i, j)) * w[i];
    out[j] = acc;
  }
}

void cgemv_adjoint_parallel(const ComplexMatrix& a, const ComplexVector& w, ComplexVector& out) {
  require(a.rows() == w.size(), "cgemv_adjoint: dimension mismatch");
  const Eigen::Index cols = a.cols();
  out.resize(cols);
#pragma omp parallel for schedule(static) if (cols * a.rows() > kParallelCutoff)
  for (Eigen::Index j = 0; j < cols; ++j) {
    out[j] = a.col(j).dot(w);  // col.dot conjugates the column: exactly A^H w
  }
}

void cgemv_adjoint(const ComplexMatrix& a, const ComplexVector& w, ComplexVector& out) {
  if (use_parallel())
    cgemv_adjoint_parallel(a, w, out);
  else
    cgemv_adjoint_serial(a, w, out);
}

void hadamard_conj_serial(const ComplexVector& a, const ComplexVector& b, ComplexVector& out) {
  require(a.size() == b.size(), "hadamard_conj: dimension mismatch");
  out.resize(a.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out[i] = a[i] * std::conj(b[i]);
}

void hadamard_conj_parallel(const ComplexVector& a, const ComplexVector& b, ComplexVector& out) {
  require(a.size() == b.size(), "hadamard_conj: dimension mismatch");
  const Eigen::Index n = a.size();
  out.resize(n);
#pragma omp parallel for schedule(static) if (n > kParallelCutoff)
  for (Eigen::Index i = 0; i < n; ++i) out[i] = a[i] * std::conj(b[i]);
}

void hadamard_conj(const ComplexVector& a, const ComplexVector& b, ComplexVector& out) {
  if (use_parallel())
    hadamard_conj_parallel(a, b, out);
  else
    hadamard_conj_serial(a, b, out);
}

double penalty_sum_serial(const ComplexVector& u, double scale) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    double t = scale * std::norm(u[i]) - 1.0;
    if (t > 0.0) acc += t * t;
  }
  return acc;
}

double penalty_sum_parallel(const ComplexVector& u, double scale) {
  const Eigen::Index n = u.size();
  const Eigen::Index nchunks = (n + kChunk - 1) / kChunk;
  RealVector partial = RealVector::Zero(nchunks);
#pragma omp parallel for schedule(static) if (n > kParallelCutoff)
  for (Eigen::Index c = 0; c < nchunks; ++c) {
    double acc = 0.0;
    const Eigen::Index hi = std::min(n, (c + 1) * kChunk);
    for (Eigen::Index i = c * kChunk; i < hi; ++i) {
      double t = scale * std::norm(u[i]) - 1.0;
      if (t > 0.0) acc += t * t;
    }
    partial[c] = acc;
  }
  double total = 0.0;
  for (Eigen::Index c = 0; c < nchunks; ++c) total += partial[c];
  return total;
}

double penalty_sum(const ComplexVector& u, double scale) {
  return use_parallel() ? penalty_sum_parallel(u, scale) : penalty_sum_serial(u, scale);
}

double penalty_weights_serial(const ComplexVector& u, double scale, RealVector& weights) {
  weights.resize(u.size());
  double acc = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    double a = std::norm(u[i]);
    double t = scale * a - 1.0;
    double w = t > 0.0 ? 2.0 * t : 0.0;
    weights[i] = w;
    acc += w * a;
  }
  return acc;
}

double penalty_weights_parallel(const ComplexVector& u, double scale, RealVector& weights) {
  const Eigen::Index n = u.size();
  weights.resize(n);
  const Eigen::Index nchunks = (n + kChunk - 1) / kChunk;
  RealVector partial = RealVector::Zero(nchunks);
#pragma omp parallel for schedule(static) if (n > kParallelCutoff)
  for (Eigen::Index c = 0; c < nchunks; ++c) {
    double acc = 0.0;
    const Eigen::Index hi = std::min(n, (c + 1) * kChunk);
    for (Eigen::Index i = c * kChunk; i < hi; ++i) {
      double a = std::norm(u[i]);
      double t = scale * a - 1.0;
      double w = t > 0.0 ? 2.0 * t : 0.0;
      weights[i] = w;
      acc += w * a;
    }
    partial[c] = acc;
  }
  double total = 0.0;
  for (Eigen::Index c = 0; c < nchunks; ++c) total += partial[c];
  return total;
}

double penalty_weights(const ComplexVector& u, double scale, RealVector& weights) {
  return use_parallel() ? penalty_weights_parallel(u, scale, weights)
                        : penalty_weights_serial(u, scale, weights);
}

}  // namespace bdq::kernels
