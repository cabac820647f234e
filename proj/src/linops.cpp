#include "bdq/linops.hpp"

#include <algorithm>
#include <cmath>

#include "bdq/haar.hpp"
#include "bdq/kernels.hpp"
#include "bdq/rng.hpp"

namespace bdq {

PartialDftB make_partial_dft_b(int L, int K) {
  require(K >= 1, "make_partial_dft_b: K must be positive");
  require(K <= L, "make_partial_dft_b: K must not exceed L");
  return PartialDftB{K};
}

ComplexMatrix make_gaussian_c(int L, int N, std::uint64_t seed) {
  require(L >= 1 && N >= 1, "make_gaussian_c: dimensions must be positive");
  auto eng = make_engine(seed);
  std::normal_distribution<double> g(0.0, std::sqrt(0.5));
  ComplexMatrix c(L, N);
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < L; ++i) c(i, j) = Complex(g(eng), g(eng));
  return c;
}

MeasurementOperator::MeasurementOperator(int L, PartialDftB b, DenseGaussianC c)
    : MeasurementOperator(L, b, DenseMatrixC{make_gaussian_c(L, c.N, c.seed)}) {}

MeasurementOperator::MeasurementOperator(int L, PartialDftB b, DenseMatrixC c)
    : L_(L),
      K_(b.K),
      N_(static_cast<int>(c.matrix.cols())),
      b_kind_(BKind::PartialDft),
      c_kind_(CKind::Dense),
      cmat_(std::move(c.matrix)) {
  require(L_ >= 1, "MeasurementOperator: L must be positive");
  require(K_ >= 1 && K_ <= L_, "MeasurementOperator: need 1 <= K <= L");
  require(cmat_.rows() == L_, "MeasurementOperator: C must have L rows");
  require(N_ >= 1, "MeasurementOperator: N must be positive");
  fft1_.emplace(L_);
}

MeasurementOperator::MeasurementOperator(SupportDftB b, HaarSubspaceC c)
    : L_(b.rows * b.cols),
      K_(static_cast<int>(b.support.size())),
      N_(static_cast<int>(c.coeff_index.size())),
      b_kind_(BKind::SupportDft),
      c_kind_(CKind::Haar),
      support_(std::move(b.support)),
      coeff_index_(std::move(c.coeff_index)) {
  require(b.rows >= 1 && b.cols >= 1, "MeasurementOperator: grid must be nonempty");
  require(b.rows == c.rows && b.cols == c.cols, "MeasurementOperator: grid mismatch");
  require(is_power_of_two(b.rows) && is_power_of_two(b.cols),
          "MeasurementOperator: Haar subspace needs power-of-two grid");
  require(K_ >= 1, "MeasurementOperator: empty kernel support");
  require(N_ >= 1, "MeasurementOperator: empty coefficient set");
  for (auto idx : support_) require(idx >= 0 && idx < L_, "MeasurementOperator: support out of range");
  for (auto idx : coeff_index_)
    require(idx >= 0 && idx < L_, "MeasurementOperator: coefficient index out of range");
  fft2_.emplace(b.rows, b.cols);
}

int MeasurementOperator::grid_rows() const { return fft2_ ? fft2_->rows() : L_; }
int MeasurementOperator::grid_cols() const { return fft2_ ? fft2_->cols() : 1; }

void MeasurementOperator::fft_forward(const ComplexVector& in, ComplexVector& out) const {
  if (fft1_)
    fft1_->forward(in, out);
  else
    fft2_->forward(in, out);
}

void MeasurementOperator::fft_backward(const ComplexVector& in, ComplexVector& out) const {
  if (fft1_)
    fft1_->backward(in, out);
  else
    fft2_->backward(in, out);
}

ComplexVector MeasurementOperator::apply_b(const ComplexVector& h) const {
  require(h.size() == K_, "apply_b: h must have length K");
  require_finite(h, "apply_b h");
  ComplexVector padded = ComplexVector::Zero(L_);
  if (b_kind_ == BKind::PartialDft) {
    padded.head(K_) = h;
  } else {
    for (int i = 0; i < K_; ++i) padded[support_[i]] = h[i];
  }
  ComplexVector out;
  fft_forward(padded, out);
  out /= std::sqrt(static_cast<double>(L_));
  counters_.add_fft();
  counters_.add_bh();
  return out;
}

ComplexVector MeasurementOperator::apply_b_adjoint(const ComplexVector& w, bool tally_bh) const {
  require(w.size() == L_, "apply_b_adjoint: input must have length L");
  require_finite(w, "apply_b_adjoint w");
  ComplexVector full;
  fft_backward(w, full);
  full /= std::sqrt(static_cast<double>(L_));
  ComplexVector out(K_);
  if (b_kind_ == BKind::PartialDft) {
    out = full.head(K_);
  } else {
    for (int i = 0; i < K_; ++i) out[i] = full[support_[i]];
  }
  counters_.add_fft();
  if (tally_bh) counters_.add_bh();
  return out;
}

ComplexVector MeasurementOperator::apply_c(const ComplexVector& m) const {
  require(m.size() == N_, "apply_c: m must have length N");
  require_finite(m, "apply_c m");
  ComplexVector out;
  if (c_kind_ == CKind::Dense) {
    kernels::cgemv(cmat_, m, out);
  } else {
    ComplexMatrix coeffs = ComplexMatrix::Zero(grid_rows(), grid_cols());
    for (int i = 0; i < N_; ++i) coeffs(coeff_index_[i]) = m[i];
    ComplexMatrix img = haar_synthesis(coeffs);
    // C = conj(F2) W_sel, and conj(F2) x = conj(F2 conj(x)).
    ComplexVector flat = img.reshaped().conjugate();
    fft_forward(flat, out);
    out = out.conjugate() / std::sqrt(static_cast<double>(L_));
  }
  counters_.add_fft();
  counters_.add_cm();
  return out;
}

ComplexVector MeasurementOperator::apply_c_adjoint(const ComplexVector& z) const {
  require(z.size() == L_, "apply_c_adjoint: input must have length L");
  require_finite(z, "apply_c_adjoint z");
  ComplexVector out;
  if (c_kind_ == CKind::Dense) {
    kernels::cgemv_adjoint(cmat_, z, out);
  } else {
    // C^* = W_sel^T F2 (the DFT matrix is symmetric).
    ComplexVector spec;
    fft_forward(z, spec);
    spec /= std::sqrt(static_cast<double>(L_));
    ComplexMatrix grid = spec.reshaped(grid_rows(), grid_cols());
    ComplexMatrix coeffs = haar_analysis(grid);
    out.resize(N_);
    for (int i = 0; i < N_; ++i) out[i] = coeffs(coeff_index_[i]);
  }
  counters_.add_fft();
  counters_.add_cm();
  return out;
}

ComplexVector MeasurementOperator::apply_forward(const ComplexVector& h,
                                                 const ComplexVector& m) const {
  ComplexVector u = apply_b(h);
  ComplexVector v = apply_c(m);
  ComplexVector out;
  kernels::hadamard_conj(u, v, out);
  return out;
}

ComplexMatrix MeasurementOperator::apply_adjoint(const ComplexVector& z) const {
  require(z.size() == L_, "apply_adjoint: input must have length L");
  ComplexMatrix out(K_, N_);
  ComplexVector ej = ComplexVector::Zero(N_);
  for (int j = 0; j < N_; ++j) {
    ej[j] = 1.0;
    ComplexVector cj = apply_c(ej);
    ej[j] = 0.0;
    out.col(j) = apply_b_adjoint(z.cwiseProduct(cj));
  }
  return out;
}

ComplexVector MeasurementOperator::apply_adjoint_times(const ComplexVector& z,
                                                       const ComplexVector& v) const {
  require(z.size() == L_, "apply_adjoint_times: z must have length L");
  require(v.size() == N_, "apply_adjoint_times: v must have length N");
  return apply_b_adjoint(z.cwiseProduct(apply_c(v)));
}

ComplexVector MeasurementOperator::apply_adjoint_conj_times(const ComplexVector& z,
                                                            const ComplexVector& u) const {
  require(z.size() == L_, "apply_adjoint_conj_times: z must have length L");
  require(u.size() == K_, "apply_adjoint_conj_times: u must have length K");
  return apply_c_adjoint(z.conjugate().cwiseProduct(apply_b(u)));
}

ComplexVector make_noise(const NoiseModel& nm, int L, double signal_norm) {
  require(L >= 1, "make_noise: L must be positive");
  auto eng = make_engine(nm.seed);
  ComplexVector w = complex_gaussian(L, eng);
  double nw = w.norm();
  if (nw == 0.0) return ComplexVector::Zero(L);
  return (nm.tau * signal_norm / nw) * w;
}

SingularTriple leading_singular_triple(const MeasurementOperator& op, const ComplexVector& y,
                                       double tol, int max_iter, std::uint64_t seed) {
  require(y.size() == op.L(), "leading_singular_triple: y must have length L");
  require(y.norm() > 0.0, "leading_singular_triple: y must be nonzero");
  require(tol > 0.0 && max_iter >= 1, "leading_singular_triple: bad tolerance or budget");

  auto eng = make_engine(seed);
  ComplexVector v = random_unit(op.N(), eng);

  ComplexVector t = op.apply_adjoint_times(y, v);
  double d = t.norm();
  if (d == 0.0)
    throw ConvergenceError("leading_singular_triple: A*(y) annihilated the start vector", 0.0,
                           ComplexVector::Zero(op.K()), v, 1.0, 0);
  ComplexVector u = t / d;

  double best_res = std::numeric_limits<double>::infinity();
  SingularTriple best;
  for (int it = 1; it <= max_iter; ++it) {
    ComplexVector w = op.apply_adjoint_conj_times(y, u);
    double e = w.norm();
    if (e == 0.0)
      throw ConvergenceError("leading_singular_triple: degenerate adjoint iterate", d, u, v, 1.0,
                             it);
    v = w / e;
    t = op.apply_adjoint_times(y, v);
    d = t.norm();
    double res = (t - e * u).norm();
    if (res < best_res) {
      best_res = res;
      best = SingularTriple{d, d > 0.0 ? ComplexVector(t / d) : u, v, it, d > 0.0 ? res / d : res};
    }
    if (d > 0.0 && res <= tol * d) {
      return SingularTriple{d, t / d, v, it, res / d};
    }
    u = t / d;
  }
  throw ConvergenceError("leading_singular_triple: no convergence within max_iter", best.d,
                         best.left, best.right, best.residual, max_iter);
}

}  // namespace bdq
