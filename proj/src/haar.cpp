#include "bdq/haar.hpp"

#include <cmath>
#include <vector>

namespace bdq {

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

template <typename Scalar>
void analysis_1d(Scalar* v, Eigen::Index n, std::vector<Scalar>& scratch) {
  scratch.resize(n);
  for (Eigen::Index len = n; len > 1; len /= 2) {
    Eigen::Index half = len / 2;
    for (Eigen::Index i = 0; i < half; ++i) {
      Scalar a = v[2 * i];
      Scalar b = v[2 * i + 1];
      scratch[i] = (a + b) * kInvSqrt2;
      scratch[half + i] = (a - b) * kInvSqrt2;
    }
    for (Eigen::Index i = 0; i < len; ++i) v[i] = scratch[i];
  }
}

template <typename Scalar>
void synthesis_1d(Scalar* v, Eigen::Index n, std::vector<Scalar>& scratch) {
  scratch.resize(n);
  for (Eigen::Index len = 2; len <= n; len *= 2) {
    Eigen::Index half = len / 2;
    for (Eigen::Index i = 0; i < half; ++i) {
      Scalar s = v[i];
      Scalar d = v[half + i];
      scratch[2 * i] = (s + d) * kInvSqrt2;
      scratch[2 * i + 1] = (s - d) * kInvSqrt2;
    }
    for (Eigen::Index i = 0; i < len; ++i) v[i] = scratch[i];
  }
}

template <typename Mat, typename Scalar, void (*Pass)(Scalar*, Eigen::Index, std::vector<Scalar>&)>
Mat transform_2d(const Mat& in) {
  if (!is_power_of_two(in.rows()) || !is_power_of_two(in.cols()))
    throw DimensionError("haar: dimensions must be powers of two");
  Mat out = in;
  std::vector<Scalar> scratch;
  for (Eigen::Index c = 0; c < out.cols(); ++c) Pass(out.col(c).data(), out.rows(), scratch);
  std::vector<Scalar> row(out.cols());
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    for (Eigen::Index c = 0; c < out.cols(); ++c) row[c] = out(r, c);
    Pass(row.data(), out.cols(), scratch);
    for (Eigen::Index c = 0; c < out.cols(); ++c) out(r, c) = row[c];
  }
  return out;
}

}  // namespace

RealMatrix haar_analysis(const RealMatrix& img) {
  return transform_2d<RealMatrix, double, analysis_1d<double>>(img);
}

RealMatrix haar_synthesis(const RealMatrix& coeffs) {
  return transform_2d<RealMatrix, double, synthesis_1d<double>>(coeffs);
}

ComplexMatrix haar_analysis(const ComplexMatrix& img) {
  return transform_2d<ComplexMatrix, Complex, analysis_1d<Complex>>(img);
}

ComplexMatrix haar_synthesis(const ComplexMatrix& coeffs) {
  return transform_2d<ComplexMatrix, Complex, synthesis_1d<Complex>>(coeffs);
}

}  // namespace bdq
