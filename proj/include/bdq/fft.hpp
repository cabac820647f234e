#pragma once

#include <memory>

#include "bdq/types.hpp"

namespace bdq {

/// Unnormalized 1D DFT pair (FFTW backend). forward() computes
/// X_j = sum_k x_k exp(-2*pi*i*j*k/n); backward() the conjugate sum.
/// Plans are created with FFTW_UNALIGNED so execution on arbitrary
/// caller buffers is safe; concurrent execute calls on one plan are fine.
class Fft1D {
 public:
  explicit Fft1D(int n);
  ~Fft1D();
  Fft1D(const Fft1D&) = delete;
  Fft1D& operator=(const Fft1D&) = delete;
  Fft1D(Fft1D&&) noexcept;
  Fft1D& operator=(Fft1D&&) noexcept;

  int size() const { return n_; }
  void forward(const ComplexVector& in, ComplexVector& out) const;
  void backward(const ComplexVector& in, ComplexVector& out) const;

 private:
  int n_ = 0;
  void* fwd_ = nullptr;  // fftw_plan
  void* bwd_ = nullptr;
};

/// Unnormalized 2D DFT on rows-by-cols data flattened column-major over
/// (row, col); this matches Eigen's default matrix storage.
class Fft2D {
 public:
  Fft2D(int rows, int cols);
  ~Fft2D();
  Fft2D(const Fft2D&) = delete;
  Fft2D& operator=(const Fft2D&) = delete;
  Fft2D(Fft2D&&) noexcept;
  Fft2D& operator=(Fft2D&&) noexcept;

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  Eigen::Index size() const { return static_cast<Eigen::Index>(rows_) * cols_; }
  void forward(const ComplexVector& in, ComplexVector& out) const;
  void backward(const ComplexVector& in, ComplexVector& out) const;

 private:
  int rows_ = 0, cols_ = 0;
  void* fwd_ = nullptr;
  void* bwd_ = nullptr;
};

}  // namespace bdq
