#pragma once

#include <vector>

#include "bdq/types.hpp"

namespace bdq {

using BoolMatrix = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Anti-aliased motion-blur line of the given length and angle (degrees),
/// unit line width, normalized to sum 1; nonzero entries form the support.
RealMatrix make_motion_kernel(double length, double angle_deg);

/// Anisotropic Gaussian kernel truncated where the density drops below
/// truncate_rel of its peak; throws on a degenerate covariance.
RealMatrix make_gaussian_kernel(const Eigen::Matrix2d& cov, double truncate_rel = 1e-4);

/// Kernel supported on a rasterized sine curve of the given arc length,
/// amplitude, and number of periods.
RealMatrix make_sin_kernel(double length, double amplitude, double periods);

BoolMatrix kernel_support(const RealMatrix& kernel);

/// Chebyshev dilation by px pixels; output grows by px on every side so the
/// kernel center stays at (rows/2, cols/2).
BoolMatrix dilate_mask(const BoolMatrix& mask, int px);

/// Place a small kernel into an R-by-C grid for circular convolution: kernel
/// pixel (i,j) lands at ((i - kr/2) mod R, (j - kc/2) mod C).
RealMatrix stamp_kernel(const RealMatrix& kernel, int rows, int cols);
BoolMatrix stamp_mask(const BoolMatrix& mask, int rows, int cols);

/// Sorted column-major flat indices of the true entries.
std::vector<Eigen::Index> mask_flat_indices(const BoolMatrix& grid_mask);

/// Periodic (wrap-around) convolution of an image with a small kernel.
RealMatrix circular_convolve(const RealMatrix& img, const RealMatrix& kernel);

}  // namespace bdq
