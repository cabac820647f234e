#include "bdq/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <vector>

namespace bdq {

namespace {

// FFTW's planner is not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(ComplexVector& v) { return reinterpret_cast<fftw_complex*>(v.data()); }
const fftw_complex* as_fftw(const ComplexVector& v) {
  return reinterpret_cast<const fftw_complex*>(v.data());
}

}  // namespace

Fft1D::Fft1D(int n) : n_(n) {
  require(n >= 1, "Fft1D: size must be positive");
  std::vector<Complex> scratch_in(n), scratch_out(n);
  auto* in = reinterpret_cast<fftw_complex*>(scratch_in.data());
  auto* out = reinterpret_cast<fftw_complex*>(scratch_out.data());
  std::lock_guard<std::mutex> lock(planner_mutex());
  fwd_ = fftw_plan_dft_1d(n, in, out, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  bwd_ = fftw_plan_dft_1d(n, in, out, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
}

Fft1D::~Fft1D() {
  if (fwd_ || bwd_) {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (fwd_) fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
    if (bwd_) fftw_destroy_plan(static_cast<fftw_plan>(bwd_));
  }
}

Fft1D::Fft1D(Fft1D&& o) noexcept : n_(o.n_), fwd_(o.fwd_), bwd_(o.bwd_) {
  o.fwd_ = o.bwd_ = nullptr;
}

Fft1D& Fft1D::operator=(Fft1D&& o) noexcept {
  std::swap(n_, o.n_);
  std::swap(fwd_, o.fwd_);
  std::swap(bwd_, o.bwd_);
  return *this;
}

void Fft1D::forward(const ComplexVector& in, ComplexVector& out) const {
  require(in.size() == n_, "Fft1D::forward: wrong input length");
  out.resize(n_);
  fftw_execute_dft(static_cast<fftw_plan>(fwd_), const_cast<fftw_complex*>(as_fftw(in)),
                   as_fftw(out));
}

void Fft1D::backward(const ComplexVector& in, ComplexVector& out) const {
  require(in.size() == n_, "Fft1D::backward: wrong input length");
  out.resize(n_);
  fftw_execute_dft(static_cast<fftw_plan>(bwd_), const_cast<fftw_complex*>(as_fftw(in)),
                   as_fftw(out));
}

Fft2D::Fft2D(int rows, int cols) : rows_(rows), cols_(cols) {
  require(rows >= 1 && cols >= 1, "Fft2D: sizes must be positive");
  std::vector<Complex> scratch_in(size()), scratch_out(size());
  auto* in = reinterpret_cast<fftw_complex*>(scratch_in.data());
  auto* out = reinterpret_cast<fftw_complex*>(scratch_out.data());
  std::lock_guard<std::mutex> lock(planner_mutex());
  // Column-major (rows, cols) data is row-major (cols, rows) for FFTW.
  fwd_ = fftw_plan_dft_2d(cols, rows, in, out, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  bwd_ = fftw_plan_dft_2d(cols, rows, in, out, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
}

Fft2D::~Fft2D() {
  if (fwd_ || bwd_) {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (fwd_) fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
    if (bwd_) fftw_destroy_plan(static_cast<fftw_plan>(bwd_));
  }
}

Fft2D::Fft2D(Fft2D&& o) noexcept : rows_(o.rows_), cols_(o.cols_), fwd_(o.fwd_), bwd_(o.bwd_) {
  o.fwd_ = o.bwd_ = nullptr;
}

Fft2D& Fft2D::operator=(Fft2D&& o) noexcept {
  std::swap(rows_, o.rows_);
  std::swap(cols_, o.cols_);
  std::swap(fwd_, o.fwd_);
  std::swap(bwd_, o.bwd_);
  return *this;
}

void Fft2D::forward(const ComplexVector& in, ComplexVector& out) const {
  require(in.size() == size(), "Fft2D::forward: wrong input length");
  out.resize(size());
  fftw_execute_dft(static_cast<fftw_plan>(fwd_), const_cast<fftw_complex*>(as_fftw(in)),
                   as_fftw(out));
}

void Fft2D::backward(const ComplexVector& in, ComplexVector& out) const {
  require(in.size() == size(), "Fft2D::backward: wrong input length");
  out.resize(size());
  fftw_execute_dft(static_cast<fftw_plan>(bwd_), const_cast<fftw_complex*>(as_fftw(in)),
                   as_fftw(out));
}

}  // namespace bdq
