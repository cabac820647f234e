#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/SVD>
#include <complex>
#include <cstring>

#include "bdq/linops.hpp"
#include "bdq/rng.hpp"

using namespace bdq;

namespace {
constexpr double kPi = 3.14159265358979323846;

ComplexMatrix dense_unitary_dft(int L) {
  ComplexMatrix f(L, L);
  for (int j = 0; j < L; ++j)
    for (int k = 0; k < L; ++k)
      f(j, k) = std::polar(1.0 / std::sqrt((double)L), -2.0 * kPi * j * k / L);
  return f;
}
}  // namespace

TEST_CASE("partial DFT B: closed forms at tiny sizes") {
  SUBCASE("1x1 DFT is the identity") {
    MeasurementOperator op(1, make_partial_dft_b(1, 1), DenseMatrixC{ComplexMatrix::Ones(1, 1)});
    ComplexVector h(1);
    h << Complex(1, 0);
    ComplexVector bh = op.apply_b(h);
    CHECK(std::abs(bh[0] - Complex(1, 0)) < 1e-15);
  }
  SUBCASE("L=2, K=1: column of the 2-point unitary DFT") {
    MeasurementOperator op(2, make_partial_dft_b(2, 1), DenseMatrixC{ComplexMatrix::Ones(2, 1)});
    ComplexVector h(1);
    h << Complex(1, 0);
    ComplexVector bh = op.apply_b(h);
    double isq = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(bh[0] - Complex(isq, 0)) < 1e-15);
    CHECK(std::abs(bh[1] - Complex(isq, 0)) < 1e-15);
  }
  SUBCASE("L=4, K=2 matches the dense DFT matrix") {
    auto eng = make_engine(42);
    MeasurementOperator op(4, make_partial_dft_b(4, 2), DenseMatrixC{ComplexMatrix::Ones(4, 1)});
    ComplexVector h = complex_gaussian(2, eng);
    ComplexVector got = op.apply_b(h);
    ComplexVector want = dense_unitary_dft(4).leftCols(2) * h;
    CHECK((got - want).norm() <= 1e-12 * want.norm());
  }
  SUBCASE("K > L rejected") {
    CHECK_THROWS_AS(make_partial_dft_b(3, 4), DimensionError);
    CHECK_THROWS_AS(make_partial_dft_b(3, 0), DimensionError);
  }
}

TEST_CASE("gaussian C: determinism and moments") {
  ComplexMatrix a = make_gaussian_c(20, 5, 123);
  ComplexMatrix b = make_gaussian_c(20, 5, 123);
  CHECK(std::memcmp(a.data(), b.data(), sizeof(Complex) * a.size()) == 0);
  CHECK((make_gaussian_c(20, 5, 124) - make_gaussian_c(20, 5, 123)).norm() > 0.0);

  ComplexMatrix big = make_gaussian_c(10000, 1, 7);
  double mean_sq = big.squaredNorm() / 10000.0;  // E|C_ij|^2 = 1
  CHECK(mean_sq == doctest::Approx(1.0).epsilon(0.05));

  double sum = 0.0, sum2 = 0.0;
  for (int s = 0; s < 10000; ++s) {
    double re = make_gaussian_c(1, 1, 1000 + s)(0, 0).real();
    sum += re;
    sum2 += re * re;
  }
  double var = sum2 / 10000.0 - (sum / 10000.0) * (sum / 10000.0);
  CHECK(var == doctest::Approx(0.5).epsilon(0.10));
}

TEST_CASE("apply_A: worked example and oracles") {
  SUBCASE("zero factors give the zero vector") {
    auto eng = make_engine(5);
    MeasurementOperator op(8, make_partial_dft_b(8, 3), DenseGaussianC{2, 9});
    ComplexVector h = ComplexVector::Zero(3);
    ComplexVector m = complex_gaussian(2, eng);
    CHECK(op.apply_forward(h, m).norm() == 0.0);
    h = complex_gaussian(3, eng);
    m.setZero();
    CHECK(op.apply_forward(h, m).norm() == 0.0);
  }
  SUBCASE("L=2, K=N=1 with C=[1, i]") {
    ComplexMatrix c(2, 1);
    c << Complex(1, 0), Complex(0, 1);
    MeasurementOperator op(2, make_partial_dft_b(2, 1), DenseMatrixC{c});
    ComplexVector h(1), m(1);
    h << Complex(1, 0);
    m << Complex(1, 0);
    ComplexVector a = op.apply_forward(h, m);
    double isq = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(a[0] - Complex(isq, 0)) < 1e-15);
    CHECK(std::abs(a[1] - Complex(0, -isq)) < 1e-15);
    // adjoint worked example: z = [1, 0] -> A*(z) = [1/sqrt(2)]
    ComplexVector z(2);
    z << Complex(1, 0), Complex(0, 0);
    ComplexMatrix adj = op.apply_adjoint(z);
    CHECK(std::abs(adj(0, 0) - Complex(isq, 0)) < 1e-14);
  }
  SUBCASE("random small instance matches dense diag(B h m* C*)") {
    auto eng = make_engine(6);
    MeasurementOperator op(8, make_partial_dft_b(8, 3), DenseGaussianC{2, 31});
    ComplexVector h = complex_gaussian(3, eng);
    ComplexVector m = complex_gaussian(2, eng);
    ComplexMatrix bd = dense_unitary_dft(8).leftCols(3);
    ComplexMatrix z = bd * h * m.adjoint() * op.dense_c().adjoint();
    ComplexVector want = z.diagonal();
    ComplexVector got = op.apply_forward(h, m);
    CHECK((got - want).norm() <= 1e-12 * want.norm());
    CHECK_THROWS_AS(op.apply_forward(complex_gaussian(4, eng), m), DimensionError);
  }
}

TEST_CASE("adjoint identity and matrix-free actions") {
  auto eng = make_engine(77);
  MeasurementOperator op(8, make_partial_dft_b(8, 3), DenseGaussianC{2, 51});
  ComplexVector z = complex_gaussian(8, eng);
  CHECK(op.apply_adjoint(ComplexVector::Zero(8)).norm() == 0.0);

  ComplexVector h = complex_gaussian(3, eng);
  ComplexVector m = complex_gaussian(2, eng);
  ComplexVector a = op.apply_forward(h, m);
  ComplexMatrix adj = op.apply_adjoint(z);
  double lhs = a.dot(z).real();
  double rhs = (h.adjoint() * adj * m)(0).real();
  CHECK(std::abs(lhs - rhs) <= 1e-12 * (std::abs(lhs) + 1.0));

  ComplexVector v = complex_gaussian(2, eng);
  CHECK((op.apply_adjoint_times(z, v) - adj * v).norm() <= 1e-12 * (adj * v).norm());
  CHECK(op.apply_adjoint_times(z, ComplexVector::Zero(2)).norm() == 0.0);
  ComplexVector u = complex_gaussian(3, eng);
  CHECK((op.apply_adjoint_conj_times(z, u) - adj.adjoint() * u).norm() <=
        1e-12 * (adj.adjoint() * u).norm());

  SUBCASE("scalar case K=N=1") {
    MeasurementOperator sop(4, make_partial_dft_b(4, 1), DenseGaussianC{1, 3});
    ComplexVector zz = complex_gaussian(4, eng);
    ComplexVector vv(1);
    vv << Complex(0.3, -0.4);
    ComplexMatrix sadj = sop.apply_adjoint(zz);
    CHECK(std::abs(sop.apply_adjoint_times(zz, vv)[0] - sadj(0, 0) * vv[0]) < 1e-13);
  }
}

TEST_CASE("operation counters") {
  MeasurementOperator op(16, make_partial_dft_b(16, 4), DenseGaussianC{3, 8});
  auto eng = make_engine(9);
  ComplexVector h = complex_gaussian(4, eng);
  ComplexVector m = complex_gaussian(3, eng);
  CounterSnapshot before = op.counters().snapshot();
  op.apply_forward(h, m);
  CounterSnapshot d = op.counters().snapshot() - before;
  CHECK(d.fft == 2);
  CHECK(d.bh == 1);
  CHECK(d.cm == 1);

  before = op.counters().snapshot();
  op.apply_b_adjoint(complex_gaussian(16, eng), /*tally_bh=*/false);
  d = op.counters().snapshot() - before;
  CHECK(d.fft == 1);
  CHECK(d.bh == 0);
}

TEST_CASE("noise model") {
  NoiseModel nm{0.01, 99};
  ComplexVector e = make_noise(nm, 256, 2.5);
  CHECK(e.norm() == doctest::Approx(0.01 * 2.5).epsilon(1e-12));
  // independent real and imaginary parts: correlation near zero
  ComplexVector big = make_noise(NoiseModel{1.0, 5}, 20000, 1.0);
  double corr = 0.0, vr = 0.0, vi = 0.0;
  for (Eigen::Index i = 0; i < big.size(); ++i) {
    corr += big[i].real() * big[i].imag();
    vr += big[i].real() * big[i].real();
    vi += big[i].imag() * big[i].imag();
  }
  CHECK(std::abs(corr) / std::sqrt(vr * vi) < 0.05);
}

TEST_CASE("leading singular triple") {
  SUBCASE("rank-one A*(y): d equals the Frobenius norm") {
    // L=1 makes A*(y) = y_0 b_0 c_0^* exactly rank one
    MeasurementOperator op(1, make_partial_dft_b(1, 1), DenseMatrixC{ComplexMatrix::Ones(1, 2)});
    ComplexVector y(1);
    y << Complex(2.0, 1.0);
    SingularTriple trip = leading_singular_triple(op, y, 1e-10, 100, 4);
    ComplexMatrix m = op.apply_adjoint(y);
    CHECK(trip.d == doctest::Approx(m.norm()).epsilon(1e-8));
  }
  SUBCASE("matches a dense SVD oracle up to phase") {
    auto eng = make_engine(14);
    MeasurementOperator op(20, make_partial_dft_b(20, 5), DenseGaussianC{4, 60});
    ComplexVector y = complex_gaussian(20, eng);
    SingularTriple trip = leading_singular_triple(op, y, 1e-12, 5000, 8);
    ComplexMatrix m = op.apply_adjoint(y);
    Eigen::JacobiSVD<ComplexMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    CHECK(trip.d == doctest::Approx(svd.singularValues()[0]).epsilon(1e-8));
    CHECK(std::abs(svd.matrixU().col(0).dot(trip.left)) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(std::abs(svd.matrixV().col(0).dot(trip.right)) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(trip.left.norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(trip.right.norm() == doctest::Approx(1.0).epsilon(1e-12));
    // the contracted residual of the returned triple
    ComplexVector res = op.apply_adjoint_times(y, trip.right) - trip.d * trip.left;
    CHECK(res.norm() <= 1e-8 * trip.d);
  }
  SUBCASE("deterministic in the seed") {
    auto eng = make_engine(15);
    MeasurementOperator op(12, make_partial_dft_b(12, 3), DenseGaussianC{3, 61});
    ComplexVector y = complex_gaussian(12, eng);
    SingularTriple t1 = leading_singular_triple(op, y, 1e-10, 500, 77);
    SingularTriple t2 = leading_singular_triple(op, y, 1e-10, 500, 77);
    CHECK((t1.left - t2.left).norm() == 0.0);
    CHECK(t1.d == t2.d);
  }
  SUBCASE("non-convergence raises with the best iterate attached") {
    auto eng = make_engine(16);
    MeasurementOperator op(16, make_partial_dft_b(16, 4), DenseGaussianC{4, 62});
    ComplexVector y = complex_gaussian(16, eng);
    CHECK_THROWS_AS(leading_singular_triple(op, y, 1e-14, 1, 5), ConvergenceError);
    try {
      leading_singular_triple(op, y, 1e-14, 1, 5);
    } catch (const ConvergenceError& e) {
      CHECK(e.value > 0.0);
      CHECK(e.left.size() == 4);
      CHECK(e.right.size() == 4);
    }
    CHECK_THROWS_AS(leading_singular_triple(op, ComplexVector::Zero(16), 1e-10, 10, 5),
                    DimensionError);
  }
  SUBCASE("noiseless synthetic d within 10 percent of d*") {
    // The spectral estimate concentrates once L clears the K log^2 L
    // threshold; below it (e.g. L = 500 at K = N = 50) the band is missed
    // routinely, which the acceptance suite documents.
    auto eng = make_engine(17);
    const int K = 50, N = 50, L = 2500;
    MeasurementOperator op(L, make_partial_dft_b(L, K), DenseGaussianC{N, 63});
    ComplexVector h = complex_gaussian(K, eng);
    ComplexVector m = complex_gaussian(N, eng);
    double dstar = h.norm() * m.norm();
    ComplexVector y = op.apply_forward(h, m);
    SingularTriple trip = leading_singular_triple(op, y, 1e-10, 500, 18);
    CHECK(trip.d >= 0.9 * dstar);
    CHECK(trip.d <= 1.1 * dstar);
  }
}
