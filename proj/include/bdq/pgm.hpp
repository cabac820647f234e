#pragma once

#include <string>

#include "bdq/types.hpp"

namespace bdq {

/// Binary 8-bit PGM (P5). Pixels map linearly between [0,1] and 0..255.
RealMatrix read_pgm(const std::string& path);
void write_pgm(const std::string& path, const RealMatrix& img);

/// Deterministic grayscale test image: a leaf-like blob with veins on a
/// gradient background. Smooth enough that a small Haar subspace captures
/// most of its energy.
RealMatrix synthetic_leaf_image(int rows, int cols);

/// Piecewise-constant image on dyadic blocks; exactly sparse in the Haar
/// basis (for the degenerate-deblur test).
RealMatrix dyadic_block_image(int rows, int cols);

}  // namespace bdq
