#include "bdq/deblur.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bdq/fft.hpp"

namespace bdq {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kEps = std::numeric_limits<double>::epsilon();

RealMatrix normalize_sum(RealMatrix k) {
  double s = k.sum();
  require(s > 0.0, "kernel: degenerate (zero mass)");
  return k / s;
}
}  // namespace

RealMatrix make_motion_kernel(double length, double angle_deg) {
  const double len = std::max(1.0, length);
  const double half = (len - 1.0) / 2.0;
  double deg = std::fmod(angle_deg, 180.0);
  if (deg < 0.0) deg += 180.0;
  const double phi = deg / 180.0 * kPi;
  const double cosphi = std::cos(phi);
  const double sinphi = std::sin(phi);
  const double linewdt = 1.0;

  if (std::abs(cosphi) < 1e-12) {
    // vertical line
    int n = static_cast<int>(std::floor(half)) * 2 + 1;
    return normalize_sum(RealMatrix::Ones(n, 1));
  }

  const int xsign = cosphi >= 0.0 ? 1 : -1;
  const int sx = static_cast<int>(std::trunc(half * cosphi + linewdt * sinphi - len * kEps));
  const int sy = static_cast<int>(std::trunc(half * sinphi + linewdt * cosphi - len * kEps));
  const int nx = std::max(std::abs(sx), 0) + 1;
  const int ny = std::max(sy, 0) + 1;

  RealMatrix quarter(ny, nx);
  for (int iy = 0; iy < ny; ++iy) {
    for (int k = 0; k < nx; ++k) {
      const double xv = k * xsign;
      const double yv = iy;
      double dist = yv * cosphi - xv * sinphi;  // signed distance to the line
      const double rad = std::hypot(xv, yv);
      if (rad >= half && std::abs(dist) <= linewdt) {
        // beyond the segment end: distance to the end point
        double overshoot = half - std::abs((xv + dist * sinphi) / cosphi);
        dist = std::hypot(dist, overshoot);
      }
      double w = linewdt + kEps - std::abs(dist);
      quarter(iy, k) = w > 0.0 ? w : 0.0;
    }
  }

  RealMatrix full = RealMatrix::Zero(2 * ny - 1, 2 * nx - 1);
  for (int i = 0; i < ny; ++i)
    for (int j = 0; j < nx; ++j) full(ny - 1 - i, nx - 1 - j) = quarter(i, j);
  full.block(ny - 1, nx - 1, ny, nx) = quarter;
  if (cosphi > 0.0) full = full.colwise().reverse().eval();
  return normalize_sum(std::move(full));
}

RealMatrix make_gaussian_kernel(const Eigen::Matrix2d& cov, double truncate_rel) {
  require(cov.allFinite(), "gaussian kernel: covariance must be finite");
  double det = cov.determinant();
  if (det <= 0.0) throw DimensionError("gaussian kernel: degenerate covariance");
  Eigen::Matrix2d inv = cov.inverse();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(cov);
  double sigma_max = std::sqrt(es.eigenvalues().maxCoeff());
  int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma_max)));
  int n = 2 * radius + 1;
  RealMatrix k(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Eigen::Vector2d p(i - radius, j - radius);
      k(i, j) = std::exp(-0.5 * p.dot(inv * p));
    }
  }
  double cutoff = truncate_rel * k.maxCoeff();
  k = (k.array() >= cutoff).select(k, RealMatrix::Zero(n, n));
  return normalize_sum(std::move(k));
}

RealMatrix make_sin_kernel(double length, double amplitude, double periods) {
  require(length >= 1.0 && periods > 0.0, "sin kernel: bad parameters");
  const double half = length / 2.0;
  const int radius_x = static_cast<int>(std::ceil(half)) + 1;
  const int radius_y = static_cast<int>(std::ceil(std::abs(amplitude))) + 1;
  const int samples = std::max(16, static_cast<int>(32.0 * length));
  std::vector<Eigen::Vector2d> curve(samples + 1);
  for (int s = 0; s <= samples; ++s) {
    double t = -half + length * s / samples;
    curve[s] = {amplitude * std::sin(2.0 * kPi * periods * t / length), t};
  }
  RealMatrix k = RealMatrix::Zero(2 * radius_y + 1, 2 * radius_x + 1);
  for (int i = 0; i < k.rows(); ++i) {
    for (int j = 0; j < k.cols(); ++j) {
      Eigen::Vector2d p(i - radius_y, j - radius_x);
      double best = std::numeric_limits<double>::infinity();
      for (const auto& c : curve) best = std::min(best, (p - c).norm());
      double w = 1.0 - best;
      k(i, j) = w > 0.0 ? w : 0.0;
    }
  }
  return normalize_sum(std::move(k));
}

BoolMatrix kernel_support(const RealMatrix& kernel) { return kernel.array() != 0.0; }

BoolMatrix dilate_mask(const BoolMatrix& mask, int px) {
  require(px >= 0, "dilate_mask: negative radius");
  if (px == 0) return mask;
  const Eigen::Index r = mask.rows(), c = mask.cols();
  BoolMatrix out = BoolMatrix::Constant(r + 2 * px, c + 2 * px, false);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j)
      if (mask(i, j))
        for (int di = -px; di <= px; ++di)
          for (int dj = -px; dj <= px; ++dj) out(i + px + di, j + px + dj) = true;
  return out;
}

RealMatrix stamp_kernel(const RealMatrix& kernel, int rows, int cols) {
  require(kernel.rows() <= rows && kernel.cols() <= cols,
          "stamp_kernel: kernel larger than grid");
  RealMatrix grid = RealMatrix::Zero(rows, cols);
  const Eigen::Index cr = kernel.rows() / 2, cc = kernel.cols() / 2;
  for (Eigen::Index i = 0; i < kernel.rows(); ++i) {
    for (Eigen::Index j = 0; j < kernel.cols(); ++j) {
      Eigen::Index gi = ((i - cr) % rows + rows) % rows;
      Eigen::Index gj = ((j - cc) % cols + cols) % cols;
      grid(gi, gj) += kernel(i, j);
    }
  }
  return grid;
}

BoolMatrix stamp_mask(const BoolMatrix& mask, int rows, int cols) {
  require(mask.rows() <= rows && mask.cols() <= cols, "stamp_mask: mask larger than grid");
  BoolMatrix grid = BoolMatrix::Constant(rows, cols, false);
  const Eigen::Index cr = mask.rows() / 2, cc = mask.cols() / 2;
  for (Eigen::Index i = 0; i < mask.rows(); ++i) {
    for (Eigen::Index j = 0; j < mask.cols(); ++j) {
      if (!mask(i, j)) continue;
      Eigen::Index gi = ((i - cr) % rows + rows) % rows;
      Eigen::Index gj = ((j - cc) % cols + cols) % cols;
      grid(gi, gj) = true;
    }
  }
  return grid;
}

std::vector<Eigen::Index> mask_flat_indices(const BoolMatrix& grid_mask) {
  std::vector<Eigen::Index> idx;
  const Eigen::Index r = grid_mask.rows();
  for (Eigen::Index j = 0; j < grid_mask.cols(); ++j)
    for (Eigen::Index i = 0; i < r; ++i)
      if (grid_mask(i, j)) idx.push_back(j * r + i);
  return idx;
}

RealMatrix circular_convolve(const RealMatrix& img, const RealMatrix& kernel) {
  const int rows = static_cast<int>(img.rows());
  const int cols = static_cast<int>(img.cols());
  RealMatrix stamped = stamp_kernel(kernel, rows, cols);
  Fft2D fft(rows, cols);
  ComplexVector a = img.reshaped().cast<Complex>();
  ComplexVector b = stamped.reshaped().cast<Complex>();
  ComplexVector fa, fb;
  fft.forward(a, fa);
  fft.forward(b, fb);
  ComplexVector prod = fa.cwiseProduct(fb);
  ComplexVector back;
  fft.backward(prod, back);
  back /= static_cast<double>(rows) * cols;
  return back.real().reshaped(rows, cols);
}

}  // namespace bdq
