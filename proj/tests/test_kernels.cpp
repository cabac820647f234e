#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bdq/kernels.hpp"
#include "bdq/rng.hpp"

using namespace bdq;

TEST_CASE("cgemv parallel matches serial reference") {
  auto eng = make_engine(11);
  for (auto [rows, cols] : {std::pair{1, 1}, {3, 7}, {600, 100}, {2048, 33}}) {
    ComplexMatrix a(rows, cols);
    for (int j = 0; j < cols; ++j) a.col(j) = complex_gaussian(rows, eng);
    ComplexVector x = complex_gaussian(cols, eng);
    ComplexVector ys, yp;
    kernels::cgemv_serial(a, x, ys);
    kernels::cgemv_parallel(a, x, yp);
    REQUIRE(ys.size() == rows);
    CHECK((ys - yp).norm() <= 1e-12 * (ys.norm() + 1e-300));

    ComplexVector w = complex_gaussian(rows, eng);
    ComplexVector zs, zp;
    kernels::cgemv_adjoint_serial(a, w, zs);
    kernels::cgemv_adjoint_parallel(a, w, zp);
    CHECK((zs - zp).norm() <= 1e-12 * (zs.norm() + 1e-300));
    // adjoint consistency between the two kernels: <Ax, w> = <x, A^H w>
    Complex lhs = ys.dot(w);
    Complex rhs = x.dot(zs);
    CHECK(std::abs(lhs - rhs) <= 1e-10 * (std::abs(lhs) + 1.0));
  }
}

TEST_CASE("hadamard_conj variants agree") {
  auto eng = make_engine(12);
  ComplexVector a = complex_gaussian(777, eng);
  ComplexVector b = complex_gaussian(777, eng);
  ComplexVector s, p;
  kernels::hadamard_conj_serial(a, b, s);
  kernels::hadamard_conj_parallel(a, b, p);
  CHECK((s - p).norm() == 0.0);
  CHECK(s[5] == a[5] * std::conj(b[5]));
}

TEST_CASE("penalty reductions agree and honor the hinge") {
  auto eng = make_engine(13);
  ComplexVector u = complex_gaussian(4099, eng);
  for (double scale : {0.0, 0.3, 1.9}) {
    double s = kernels::penalty_sum_serial(u, scale);
    double p = kernels::penalty_sum_parallel(u, scale);
    CHECK(std::abs(s - p) <= 1e-12 * (std::abs(s) + 1.0));
    RealVector ws, wp;
    double as = kernels::penalty_weights_serial(u, scale, ws);
    double ap = kernels::penalty_weights_parallel(u, scale, wp);
    CHECK(std::abs(as - ap) <= 1e-12 * (std::abs(as) + 1.0));
    CHECK((ws - wp).norm() == 0.0);
  }
  ComplexVector tiny(2);
  tiny << Complex(0.1, 0.0), Complex(10.0, 0.0);
  // scale=1: arguments 0.01 (inactive) and 100 (active)
  CHECK(kernels::penalty_sum_serial(tiny, 1.0) == doctest::Approx(99.0 * 99.0).epsilon(1e-14));
  RealVector w;
  kernels::penalty_weights_serial(tiny, 1.0, w);
  CHECK(w[0] == 0.0);
  CHECK(w[1] == doctest::Approx(2.0 * 99.0).epsilon(1e-14));
}

TEST_CASE("empty and single-element inputs") {
  ComplexMatrix a(1, 1);
  a(0, 0) = Complex(2.0, -1.0);
  ComplexVector x(1);
  x[0] = Complex(0.5, 0.5);
  ComplexVector y;
  kernels::cgemv(a, x, y);
  CHECK(y[0] == a(0, 0) * x[0]);
  ComplexVector u(0);
  CHECK(kernels::penalty_sum(u, 2.0) == 0.0);
}
