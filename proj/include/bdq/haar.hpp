#pragma once

#include "bdq/types.hpp"

namespace bdq {

inline bool is_power_of_two(Eigen::Index n) { return n >= 1 && (n & (n - 1)) == 0; }

// Orthonormal 2D Haar wavelet transform (full separable decomposition):
// analysis computes W^T X W, synthesis its inverse. Dimensions must be
// powers of two. Parseval holds to rounding.
RealMatrix haar_analysis(const RealMatrix& img);
RealMatrix haar_synthesis(const RealMatrix& coeffs);
ComplexMatrix haar_analysis(const ComplexMatrix& img);
ComplexMatrix haar_synthesis(const ComplexMatrix& coeffs);

}  // namespace bdq
