#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>

#include "bdq/deblur.hpp"
#include "bdq/fft.hpp"
#include "bdq/haar.hpp"
#include "bdq/pgm.hpp"
#include "bdq/rng.hpp"

using namespace bdq;

TEST_CASE("haar transform") {
  SUBCASE("constant image concentrates on the scaling function") {
    RealMatrix img = RealMatrix::Constant(8, 8, 0.37);
    RealMatrix co = haar_analysis(img);
    int nonzeros = 0;
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 8; ++j)
        if (std::abs(co(i, j)) > 1e-13) ++nonzeros;
    CHECK(nonzeros == 1);
    CHECK(co(0, 0) == doctest::Approx(8.0 * 0.37).epsilon(1e-12));
  }
  SUBCASE("round trip and Parseval") {
    auto eng = make_engine(41);
    std::normal_distribution<double> g;
    RealMatrix img(8, 8);
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 8; ++j) img(i, j) = g(eng);
    RealMatrix back = haar_synthesis(haar_analysis(img));
    CHECK((back - img).cwiseAbs().maxCoeff() <= 1e-12);

    RealMatrix big(16, 16);
    for (int i = 0; i < 16; ++i)
      for (int j = 0; j < 16; ++j) big(i, j) = g(eng);
    RealMatrix co = haar_analysis(big);
    CHECK(std::abs(co.squaredNorm() - big.squaredNorm()) <= 1e-12 * big.squaredNorm());
  }
  SUBCASE("complex transform matches the real one on real data") {
    RealMatrix img = synthetic_leaf_image(16, 16);
    ComplexMatrix ci = img.cast<Complex>();
    ComplexMatrix co = haar_analysis(ci);
    RealMatrix ro = haar_analysis(img);
    CHECK((co.real() - ro).norm() <= 1e-13 * ro.norm());
    CHECK(co.imag().norm() == 0.0);
  }
  SUBCASE("non-power-of-two rejected") {
    CHECK_THROWS_AS(haar_analysis(RealMatrix(RealMatrix::Zero(6, 8))), DimensionError);
    CHECK_THROWS_AS(haar_synthesis(RealMatrix(RealMatrix::Zero(8, 12))), DimensionError);
  }
}

TEST_CASE("blur kernels") {
  SUBCASE("motion kernel at the reference parameters has 109 nonzeros") {
    RealMatrix k = make_motion_kernel(50, 45);
    int nnz = 0;
    for (Eigen::Index i = 0; i < k.rows(); ++i)
      for (Eigen::Index j = 0; j < k.cols(); ++j)
        if (k(i, j) != 0.0) ++nnz;
    CHECK(nnz == 109);
    CHECK(k.sum() == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("desk-scale motion support matches a brute-force rasterization") {
    const double len = 12.0, angle = 45.0;
    RealMatrix k = make_motion_kernel(len, angle);
    // oracle: evaluate the hat-of-distance rule on the full plane directly
    const double half = (len - 1.0) / 2.0;
    const double phi = angle / 180.0 * 3.14159265358979323846;
    const double c = std::cos(phi), s = std::sin(phi);
    const double eps = std::numeric_limits<double>::epsilon();
    int oracle = 0, R = 40;
    for (int py = -R; py <= R; ++py) {
      for (int px = -R; px <= R; ++px) {
        double dist = py * c - px * s;
        double rad = std::hypot(px, py);
        if (rad >= half && std::abs(dist) <= 1.0) {
          double overshoot = half - std::abs((px + dist * s) / c);
          dist = std::hypot(dist, overshoot);
        }
        if (1.0 + eps - std::abs(dist) > 0.0) ++oracle;
      }
    }
    int nnz = 0;
    for (Eigen::Index i = 0; i < k.rows(); ++i)
      for (Eigen::Index j = 0; j < k.cols(); ++j)
        if (k(i, j) != 0.0) ++nnz;
    CHECK(nnz == oracle);
  }
  SUBCASE("degenerate motion length gives a single-pixel identity kernel") {
    RealMatrix k = make_motion_kernel(1, 45);
    REQUIRE(k.size() == 1);
    CHECK(k(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("gaussian kernel: normalized, symmetric support, degenerate covariance rejected") {
    Eigen::Matrix2d cov;
    cov << 1.0, 0.8, 0.8, 1.0;
    RealMatrix k = make_gaussian_kernel(cov);
    CHECK(k.sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(k.minCoeff() >= 0.0);
    CHECK((k - k.transpose()).norm() <= 1e-14);  // symmetric covariance here
    Eigen::Matrix2d bad;
    bad << 1.0, 1.0, 1.0, 1.0;
    CHECK_THROWS_AS(make_gaussian_kernel(bad), DimensionError);
  }
  SUBCASE("sin kernel is normalized with nonempty support") {
    RealMatrix k = make_sin_kernel(12.0, 3.0, 1.5);
    CHECK(k.sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK((k.array() != 0.0).count() > 12);
  }
}

TEST_CASE("masks and stamping") {
  RealMatrix k = make_motion_kernel(8, 45);
  BoolMatrix mask = kernel_support(k);
  SUBCASE("dilation grows the mask monotonically") {
    BoolMatrix d1 = dilate_mask(mask, 1);
    BoolMatrix d2 = dilate_mask(mask, 2);
    CHECK(d1.count() > mask.count());
    CHECK(d2.count() > d1.count());
    // brute-force membership oracle for one dilation
    Eigen::Index hits = 0;
    for (Eigen::Index i = 0; i < d1.rows(); ++i)
      for (Eigen::Index j = 0; j < d1.cols(); ++j) {
        bool near = false;
        for (Eigen::Index a = 0; a < mask.rows() && !near; ++a)
          for (Eigen::Index b = 0; b < mask.cols() && !near; ++b)
            if (mask(a, b) && std::abs(a + 1 - i) <= 1 && std::abs(b + 1 - j) <= 1) near = true;
        if (near != d1(i, j)) ++hits;
      }
    CHECK(hits == 0);
  }
  SUBCASE("stamped indices are sorted and wrap correctly") {
    auto idx = mask_flat_indices(stamp_mask(mask, 32, 32));
    CHECK(std::is_sorted(idx.begin(), idx.end()));
    CHECK((Eigen::Index)idx.size() == mask.count());
  }
}

TEST_CASE("circular convolution against a direct wrap-around sum") {
  auto eng = make_engine(43);
  std::normal_distribution<double> g;
  RealMatrix img(8, 8);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) img(i, j) = g(eng);
  RealMatrix kernel(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) kernel(i, j) = std::abs(g(eng));
  kernel /= kernel.sum();

  RealMatrix fast = circular_convolve(img, kernel);
  RealMatrix direct = RealMatrix::Zero(8, 8);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j)
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
          int si = ((i - (a - 1)) % 8 + 8) % 8;
          int sj = ((j - (b - 1)) % 8 + 8) % 8;
          direct(i, j) += kernel(a, b) * img(si, sj);
        }
  CHECK((fast - direct).cwiseAbs().maxCoeff() <= 1e-12);

  SUBCASE("identity kernel is a no-op") {
    RealMatrix one = RealMatrix::Ones(1, 1);
    CHECK((circular_convolve(img, one) - img).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("pgm io round trip") {
  RealMatrix img = synthetic_leaf_image(32, 32);
  std::string path = "/tmp/bdq_test_img.pgm";
  write_pgm(path, img);
  RealMatrix back = read_pgm(path);
  REQUIRE(back.rows() == 32);
  REQUIRE(back.cols() == 32);
  // 8-bit quantization: half a level of error at most
  CHECK((back - img).cwiseAbs().maxCoeff() <= 0.5 / 255.0 + 1e-12);
  write_pgm(path, back);
  RealMatrix again = read_pgm(path);
  CHECK((again - back).norm() == 0.0);  // bit-exact once quantized
  CHECK_THROWS_AS(read_pgm("/tmp/definitely_not_there.pgm"), DimensionError);
}
