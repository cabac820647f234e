#pragma once

#include <atomic>
#include <cstdint>
#include <optional>
#include <vector>

#include "bdq/fft.hpp"
#include "bdq/types.hpp"

namespace bdq {

struct CounterSnapshot {
  long long bh = 0;
  long long cm = 0;
  long long fft = 0;

  CounterSnapshot operator-(const CounterSnapshot& o) const {
    return {bh - o.bh, cm - o.cm, fft - o.fft};
  }
  CounterSnapshot& operator+=(const CounterSnapshot& o) {
    bh += o.bh;
    cm += o.cm;
    fft += o.fft;
    return *this;
  }
};

/// Operation tallies of a MeasurementOperator. One "Bh" / "Cm" is one
/// application of the B or C factor (forward or adjoint); nFFT counts the
/// transform cost of those applications in the reference cost model: one per
/// B/C application, so a full A(h,m) is 2 FFT + 1 Bh + 1 Cm and a gradient
/// evaluated after a cost at the same point is 3 FFT + 1 Bh + 1 Cm.
/// Updates are atomic so concurrent applications of one operator are safe.
class OpCounters {
 public:
  void add_bh(long long n = 1) const { bh_.fetch_add(n, std::memory_order_relaxed); }
  void add_cm(long long n = 1) const { cm_.fetch_add(n, std::memory_order_relaxed); }
  void add_fft(long long n = 1) const { fft_.fetch_add(n, std::memory_order_relaxed); }
  void reset() const { bh_ = cm_ = fft_ = 0; }
  CounterSnapshot snapshot() const {
    return {bh_.load(std::memory_order_relaxed), cm_.load(std::memory_order_relaxed),
            fft_.load(std::memory_order_relaxed)};
  }

 private:
  mutable std::atomic<long long> bh_{0}, cm_{0}, fft_{0};
};

/// B = first K columns of the unitary L-by-L DFT matrix.
struct PartialDftB {
  int K = 0;
};

/// B = columns of the unitary 2D DFT (rows*cols = L, column-major flattening)
/// selected by a support mask; used by the deblurring experiments.
struct SupportDftB {
  int rows = 0, cols = 0;
  std::vector<Eigen::Index> support;  // sorted flat indices into the grid
};

/// C with i.i.d. CN(0,1) entries (N(0,1/2) real and imaginary parts),
/// realized densely and deterministic in the seed.
struct DenseGaussianC {
  int N = 0;
  std::uint64_t seed = 0;
};

/// C given explicitly; used by tests and dense oracles.
struct DenseMatrixC {
  ComplexMatrix matrix;
};

/// C = conj(F2) * (selected columns of the 2D Haar wavelet matrix): the
/// subspace of the N most significant wavelet coefficients.
struct HaarSubspaceC {
  int rows = 0, cols = 0;
  std::vector<Eigen::Index> coeff_index;  // flat column-major coefficient indices
};

PartialDftB make_partial_dft_b(int L, int K);
ComplexMatrix make_gaussian_c(int L, int N, std::uint64_t seed);

/// The measurement operator A(Z) = diag(B Z C^*) and its adjoint
/// A^*(z) = B^* diag(z) C, with FFT fast paths and operation counters.
/// B/C data is immutable after construction; applications are safe to call
/// concurrently (counters are atomic).
class MeasurementOperator {
 public:
  MeasurementOperator(int L, PartialDftB b, DenseGaussianC c);
  MeasurementOperator(int L, PartialDftB b, DenseMatrixC c);
  MeasurementOperator(SupportDftB b, HaarSubspaceC c);

  int L() const { return L_; }
  int K() const { return K_; }
  int N() const { return N_; }
  const OpCounters& counters() const { return counters_; }

  ComplexVector apply_b(const ComplexVector& h) const;
  // tally_bh=false is used by the penalty gradient's second B^* pass, which
  // the reference accounting charges as an FFT but not as a Bh multiplication
  // (Table-style counters keep nBh = nCm).
  ComplexVector apply_b_adjoint(const ComplexVector& w, bool tally_bh = true) const;
  ComplexVector apply_c(const ComplexVector& m) const;
  ComplexVector apply_c_adjoint(const ComplexVector& z) const;

  /// A(h m^*) = (B h) .* conj(C m); increments fft by 2, bh and cm by 1.
  ComplexVector apply_forward(const ComplexVector& h, const ComplexVector& m) const;

  /// Dense K-by-N adjoint, built column-by-column as B^*(z .* (C e_j));
  /// counters advance by N applications of each factor.
  ComplexMatrix apply_adjoint(const ComplexVector& z) const;

  /// Matrix-free A^*(z) v = B^*(z .* (C v)).
  ComplexVector apply_adjoint_times(const ComplexVector& z, const ComplexVector& v) const;
  /// Matrix-free A^*(z)^* u = C^*(conj(z) .* (B u)).
  ComplexVector apply_adjoint_conj_times(const ComplexVector& z, const ComplexVector& u) const;

  bool has_dense_c() const { return c_kind_ != CKind::Haar; }
  const ComplexMatrix& dense_c() const { return cmat_; }

 private:
  enum class BKind { PartialDft, SupportDft };
  enum class CKind { Dense, Haar };

  int L_ = 0, K_ = 0, N_ = 0;
  BKind b_kind_;
  CKind c_kind_;
  std::optional<Fft1D> fft1_;
  std::optional<Fft2D> fft2_;
  std::vector<Eigen::Index> support_;
  std::vector<Eigen::Index> coeff_index_;
  ComplexMatrix cmat_;
  OpCounters counters_;

  void fft_forward(const ComplexVector& in, ComplexVector& out) const;
  void fft_backward(const ComplexVector& in, ComplexVector& out) const;
  int grid_rows() const;
  int grid_cols() const;
};

struct NoiseModel {
  double tau = 0.0;
  std::uint64_t seed = 0;
};

/// e = tau * (w/||w||) * signal_norm with w ~ CN(0, I), so that
/// SNR = signal_norm^2 / ||e||^2 = 1/tau^2 exactly.
ComplexVector make_noise(const NoiseModel& nm, int L, double signal_norm);

struct SingularTriple {
  double d = 0.0;
  ComplexVector left;   // unit, length K
  ComplexVector right;  // unit, length N
  int iterations = 0;
  double residual = 0.0;
};

/// Leading singular triple of A^*(y) by alternating power iteration on the
/// matrix-free operator. Throws ConvergenceError (carrying the best iterate)
/// after max_iter sweeps above tolerance.
SingularTriple leading_singular_triple(const MeasurementOperator& op, const ComplexVector& y,
                                       double tol = 1e-10, int max_iter = 500,
                                       std::uint64_t seed = 0x5eed);

}  // namespace bdq
