#include "bdq/pgm.hpp"

#include <cmath>
#include <fstream>
#include <vector>

namespace bdq {

namespace {
int next_token(std::istream& in) {
  // PGM headers allow '#' comments between tokens.
  while (true) {
    int c = in.peek();
    if (c == '#') {
      std::string line;
      std::getline(in, line);
    } else if (std::isspace(c)) {
      in.get();
    } else {
      break;
    }
  }
  int value = -1;
  in >> value;
  return value;
}
}  // namespace

RealMatrix read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DimensionError("read_pgm: cannot open " + path);
  std::string magic;
  in >> magic;
  if (magic != "P5") throw DimensionError("read_pgm: not a binary PGM (P5): " + path);
  int cols = next_token(in);
  int rows = next_token(in);
  int maxval = next_token(in);
  if (cols <= 0 || rows <= 0 || maxval <= 0 || maxval > 255)
    throw DimensionError("read_pgm: unsupported header in " + path);
  in.get();  // single whitespace before raster
  std::vector<unsigned char> raster(static_cast<size_t>(rows) * cols);
  in.read(reinterpret_cast<char*>(raster.data()), raster.size());
  if (!in) throw DimensionError("read_pgm: truncated raster in " + path);
  RealMatrix img(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      img(i, j) = raster[static_cast<size_t>(i) * cols + j] / static_cast<double>(maxval);
  return img;
}

void write_pgm(const std::string& path, const RealMatrix& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DimensionError("write_pgm: cannot open " + path);
  out << "P5\n" << img.cols() << " " << img.rows() << "\n255\n";
  std::vector<unsigned char> raster(static_cast<size_t>(img.rows()) * img.cols());
  for (Eigen::Index i = 0; i < img.rows(); ++i) {
    for (Eigen::Index j = 0; j < img.cols(); ++j) {
      double v = std::clamp(img(i, j), 0.0, 1.0);
      raster[static_cast<size_t>(i) * img.cols() + j] =
          static_cast<unsigned char>(std::lround(v * 255.0));
    }
  }
  out.write(reinterpret_cast<const char*>(raster.data()), raster.size());
}

RealMatrix synthetic_leaf_image(int rows, int cols) {
  RealMatrix img(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      double y = (i + 0.5) / rows - 0.5;
      double x = (j + 0.5) / cols - 0.5;
      // rotated ellipse membership with a soft edge
      double c = std::cos(0.5), s = std::sin(0.5);
      double xr = c * x + s * y;
      double yr = -s * x + c * y;
      double q = xr * xr / 0.12 + yr * yr / 0.035;
      double leaf = 0.55 / (1.0 + std::exp(18.0 * (q - 1.0)));
      // central vein and side veins
      double vein = 0.18 * std::exp(-yr * yr / 0.0006) +
                    0.10 * std::exp(-std::pow(std::sin(14.0 * xr) * 0.06 - yr, 2.0) / 0.0008);
      double background = 0.18 + 0.22 * ((i + 0.5) / rows);
      double spot = 0.12 * std::exp(-((x - 0.28) * (x - 0.28) + (y + 0.3) * (y + 0.3)) / 0.01);
      img(i, j) = std::clamp(background + leaf - vein * leaf / 0.55 + spot, 0.0, 1.0);
    }
  }
  return img;
}

RealMatrix dyadic_block_image(int rows, int cols) {
  RealMatrix img = RealMatrix::Zero(rows, cols);
  img.block(0, 0, rows / 2, cols / 2).setConstant(0.8);
  img.block(rows / 2, cols / 2, rows / 4, cols / 4).setConstant(0.5);
  img.block(rows / 4, cols / 2, rows / 4, cols / 4).setConstant(0.3);
  img.block(0, cols / 2, rows / 4, cols / 2).setConstant(0.95);
  return img;
}

}  // namespace bdq
