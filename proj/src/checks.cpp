#include "bdq/checks.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <complex>
#include <limits>

namespace bdq {

namespace {

constexpr double kPi = 3.14159265358979323846;

ComplexMatrix dense_unitary_dft(int L) {
  ComplexMatrix f(L, L);
  for (int j = 0; j < L; ++j)
    for (int k = 0; k < L; ++k)
      f(j, k) = std::polar(1.0 / std::sqrt(static_cast<double>(L)),
                           -2.0 * kPi * j * k / static_cast<double>(L));
  return f;
}

ComplexMatrix operator_b_columns(const MeasurementOperator& op) {
  ComplexMatrix b(op.L(), op.K());
  ComplexVector e = ComplexVector::Zero(op.K());
  for (int j = 0; j < op.K(); ++j) {
    e[j] = 1.0;
    b.col(j) = op.apply_b(e);
    e[j] = 0.0;
  }
  return b;
}

double frob(const FactorPair& a, const FactorPair& b) {
  // dense ||a_h a_m^* - b_h b_m^*||_F; the O(K+N) identity loses half the
  // digits to cancellation when the products nearly coincide
  return (a.h * a.m.adjoint() - b.h * b.m.adjoint()).norm();
}

TangentPair random_tangent(Eigen::Index K, Eigen::Index N, std::mt19937_64& eng) {
  return {complex_gaussian(K, eng), complex_gaussian(N, eng)};
}

struct Suite {
  std::uint64_t seed;
  std::vector<CheckResult> results;

  void add(const std::string& name, double value, double threshold, bool larger_is_fail = true,
           const std::string& detail = "") {
    CheckResult r;
    r.name = name;
    r.value = value;
    r.threshold = threshold;
    r.pass = larger_is_fail ? value <= threshold : value >= threshold;
    r.detail = detail;
    results.push_back(r);
  }

  std::uint64_t sub(std::uint64_t id) const { return derive_seed(seed, {id}); }
};

void check_adjoint_identity(Suite& s) {
  auto eng = make_engine(s.sub(1));
  double worst = 0.0;
  for (int inst = 0; inst < 60; ++inst) {
    int L = 1 + static_cast<int>(eng() % 32);
    int K = 1 + static_cast<int>(eng() % L);
    int N = 1 + static_cast<int>(eng() % 32);
    MeasurementOperator op(L, make_partial_dft_b(L, K), DenseGaussianC{N, eng()});
    double gap = adjoint_pairing_gap(
        L, K, N, 4, eng(), [&](const ComplexVector& h, const ComplexVector& m) { return op.apply_forward(h, m); },
        [&](const ComplexVector& z) { return op.apply_adjoint(z); });
    worst = std::max(worst, gap);
  }
  s.add("adjoint-identity", worst, 1e-10);
}

void check_fft_vs_dense(Suite& s) {
  auto eng = make_engine(s.sub(2));
  double worst = 0.0;
  for (int inst = 0; inst < 12; ++inst) {
    int L = 2 + static_cast<int>(eng() % 31);
    int K = 1 + static_cast<int>(eng() % L);
    int N = 1 + static_cast<int>(eng() % 8);
    MeasurementOperator op(L, make_partial_dft_b(L, K), DenseGaussianC{N, eng()});
    ComplexMatrix b_oracle = dense_unitary_dft(L).leftCols(K);
    const ComplexMatrix& c = op.dense_c();
    ComplexVector h = complex_gaussian(K, eng);
    ComplexVector m = complex_gaussian(N, eng);
    ComplexVector z = complex_gaussian(L, eng);

    ComplexVector a_fast = op.apply_forward(h, m);
    ComplexVector a_dense = (b_oracle * h).cwiseProduct((c * m).conjugate());
    worst = std::max(worst, (a_fast - a_dense).norm() / (a_dense.norm() + 1e-300));

    ComplexMatrix adj_fast = op.apply_adjoint(z);
    ComplexMatrix adj_dense = b_oracle.adjoint() * z.asDiagonal() * c;
    worst = std::max(worst, (adj_fast - adj_dense).norm() / (adj_dense.norm() + 1e-300));

    ComplexVector v = complex_gaussian(N, eng);
    ComplexVector tv_fast = op.apply_adjoint_times(z, v);
    ComplexVector tv_dense = adj_dense * v;
    worst = std::max(worst, (tv_fast - tv_dense).norm() / (tv_dense.norm() + 1e-300));

    ComplexVector u = complex_gaussian(K, eng);
    ComplexVector cu_fast = op.apply_adjoint_conj_times(z, u);
    ComplexVector cu_dense = adj_dense.adjoint() * u;
    worst = std::max(worst, (cu_fast - cu_dense).norm() / (cu_dense.norm() + 1e-300));
  }
  s.add("fft-path-equals-dense", worst, 1e-12);
}

void check_b_structure(Suite& s) {
  double unit_worst = 0.0, row_worst = 0.0;
  for (auto [L, K] : {std::pair{8, 3}, std::pair{16, 16}, std::pair{24, 7}}) {
    MeasurementOperator op(L, make_partial_dft_b(L, K), DenseGaussianC{2, 7});
    ComplexMatrix b = operator_b_columns(op);
    unit_worst = std::max(
        unit_worst, (b.adjoint() * b - ComplexMatrix::Identity(K, K)).norm());
    double target = std::sqrt(static_cast<double>(K) / L);
    for (int r = 0; r < L; ++r)
      row_worst = std::max(row_worst, std::abs(b.row(r).norm() - target));
  }
  s.add("b-unitary-columns", unit_worst, 1e-12);
  s.add("b-row-norms", row_worst, 1e-12);
}

void check_counters(Suite& s) {
  auto eng = make_engine(s.sub(3));
  int L = 32, K = 5, N = 6;
  MeasurementOperator op(L, make_partial_dft_b(L, K), DenseGaussianC{N, 11});
  FactorPair truth{complex_gaussian(K, eng), complex_gaussian(N, eng)};
  ComplexVector y = op.apply_forward(truth.h, truth.m);
  Objective obj(op, y, PenaltyParams{0.3, 1.0, 1.0});
  FactorPair x{complex_gaussian(K, eng), complex_gaussian(N, eng)};

  Objective::EvalContext ctx;
  CounterSnapshot c0 = op.counters().snapshot();
  obj.cost(x, ctx);
  CounterSnapshot dc = op.counters().snapshot() - c0;
  int cost_bad = (dc.fft != 2) + (dc.bh != 1) + (dc.cm != 1);

  CounterSnapshot c1 = op.counters().snapshot();
  obj.euclidean_gradient(x, ctx);
  CounterSnapshot dg = op.counters().snapshot() - c1;
  int grad_bad = (dg.fft != 3) + (dg.bh != 1) + (dg.cm != 1);

  s.add("counter-cost-exactness", cost_bad, 0);
  s.add("counter-gradient-exactness", grad_bad, 0);
}

void check_local_rip(Suite& s) {
  auto eng = make_engine(s.sub(4));
  const int K = 20, N = 20, L = 2048;
  const double eps = 1.0 / 15.0;
  MeasurementOperator op(L, make_partial_dft_b(L, K), DenseGaussianC{N, s.sub(40)});
  FactorPair truth{complex_gaussian(K, eng), complex_gaussian(N, eng)};
  double dstar = truth.h.norm() * truth.m.norm();
  ComplexVector y = op.apply_forward(truth.h, truth.m);

  int in_band = 0;
  const int points = 100;
  std::uniform_real_distribution<double> unif(0.2, 1.0);
  for (int p = 0; p < points; ++p) {
    double target = unif(eng) * eps * dstar;
    ComplexVector dh = complex_gaussian(K, eng);
    ComplexVector dm = complex_gaussian(N, eng);
    double a = 0.5;
    FactorPair x;
    for (int it = 0; it < 60; ++it) {
      x = FactorPair{truth.h + a * dh, truth.m + a * dm};
      double delta = frob(x, truth);
      if (delta <= target) break;
      a *= 0.7;
    }
    double delta = frob(x, truth);
    ComplexVector ax = op.apply_forward(x.h, x.m);
    double w = (ax - y).squaredNorm();
    double ratio = w / (delta * delta);
    if (ratio >= 0.75 && ratio <= 1.25) ++in_band;
  }
  s.add("local-rip", static_cast<double>(in_band) / points, 0.95, /*larger_is_fail=*/false,
        "fraction of points with ||A(hm*-h#m#*)||^2 in [3/4,5/4] Delta^2");
}

void check_metric_invariance(Suite& s) {
  auto eng = make_engine(s.sub(5));
  FactorPair x{complex_gaussian(5, eng), complex_gaussian(7, eng)};
  TangentPair a = random_tangent(5, 7, eng);
  TangentPair b = random_tangent(5, 7, eng);
  double base = metric(x, a, b);
  double worst = 0.0;
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    Complex p(unif(eng), unif(eng));
    if (std::abs(p) < 1e-3) continue;
    FactorPair xp{x.h / p, x.m * std::conj(p)};
    TangentPair ap{a.dh / p, a.dm * std::conj(p)};
    TangentPair bp{b.dh / p, b.dm * std::conj(p)};
    worst = std::max(worst, std::abs(metric(xp, ap, bp) - base) / (std::abs(base) + 1e-300));
  }
  s.add("metric-invariance", worst, 1e-10);
}

void check_projection_algebra(Suite& s) {
  auto eng = make_engine(s.sub(6));
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    FactorPair x{complex_gaussian(6, eng), complex_gaussian(4, eng)};
    TangentPair v = random_tangent(6, 4, eng);
    TangentPair pv = vertical_project(x, v);
    TangentPair ph = horizontal_project(x, v);
    double scale = std::sqrt(metric_norm2(x, v)) + 1e-300;
    worst = std::max(worst, (v.dh - pv.dh - ph.dh).norm() / scale);
    worst = std::max(worst, (v.dm - pv.dm - ph.dm).norm() / scale);
    TangentPair pvv = vertical_project(x, pv);
    worst = std::max(worst, std::sqrt(metric_norm2(x, {pv.dh - pvv.dh, pv.dm - pvv.dm})) / scale);
    TangentPair phh = horizontal_project(x, ph);
    worst = std::max(worst, std::sqrt(metric_norm2(x, {ph.dh - phh.dh, ph.dm - phh.dm})) / scale);
    worst = std::max(worst, std::abs(metric(x, pv, ph)) / (scale * scale));
  }
  s.add("projection-algebra", worst, 1e-10);
}

void check_basis(Suite& s) {
  auto eng = make_engine(s.sub(7));
  FactorPair x{complex_gaussian(4, eng), complex_gaussian(5, eng)};
  auto basis = build_basis(x);
  const int dim = 2 * (4 + 5) - 2;
  double worst = std::abs(static_cast<double>(basis.size()) - dim);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    if (!is_horizontal(x, basis[i], 1e-10)) worst = std::max(worst, 1.0);
    for (std::size_t j = 0; j < basis.size(); ++j) {
      double g = metric(x, basis[i], basis[j]);
      worst = std::max(worst, std::abs(g - (i == j ? 1.0 : 0.0)));
    }
  }
  s.add("horizontal-basis-orthonormal", worst, 1e-10,
        /*larger_is_fail=*/true, "2(K+N)-2 vectors, identity Gram matrix");
}

void check_retraction(Suite& s) {
  auto eng = make_engine(s.sub(8));
  FactorPair x{complex_gaussian(5, eng), complex_gaussian(6, eng)};
  TangentPair eta = random_tangent(5, 6, eng);
  FactorPair same = retract(x, {ComplexVector::Zero(5), ComplexVector::Zero(6)});
  double worst = (same.h - x.h).norm() + (same.m - x.m).norm();
  double t = 1e-5;
  FactorPair fwd = retract(x, {t * eta.dh, t * eta.dm});
  double fd = ((fwd.h - x.h) / t - eta.dh).norm() + ((fwd.m - x.m) / t - eta.dm).norm();
  worst = std::max(worst, fd / (eta.dh.norm() + eta.dm.norm()));
  s.add("retraction-axioms", worst, 1e-6);
}

void check_transport(Suite& s) {
  auto eng = make_engine(s.sub(9));
  double worst = 0.0;
  for (int t = 0; t < 10; ++t) {
    FactorPair x{complex_gaussian(5, eng), complex_gaussian(4, eng)};
    TangentPair xi = horizontal_project(x, random_tangent(5, 4, eng));
    TangentPair eta = horizontal_project(x, random_tangent(5, 4, eng));
    double xinorm = std::sqrt(metric_norm2(x, xi)) + 1e-300;

    TangentPair id = transport(x, {ComplexVector::Zero(5), ComplexVector::Zero(4)}, xi);
    worst = std::max(worst,
                     std::sqrt(metric_norm2(x, {id.dh - xi.dh, id.dm - xi.dm})) / xinorm);

    FactorPair y = retract(x, eta);
    TangentPair moved = transport(x, eta, xi);
    if (!is_horizontal(y, moved, 1e-10)) worst = std::max(worst, 1.0);

    TangentPair xi2 = horizontal_project(x, random_tangent(5, 4, eng));
    TangentPair lhs = transport(x, eta, {2.5 * xi.dh + xi2.dh, 2.5 * xi.dm + xi2.dm});
    TangentPair m2 = transport(x, eta, xi2);
    double lin = std::sqrt(metric_norm2(
        y, {lhs.dh - 2.5 * moved.dh - m2.dh, lhs.dm - 2.5 * moved.dm - m2.dm}));
    worst = std::max(worst, lin / xinorm);
  }
  s.add("transport-axioms", worst, 1e-10);
}

void check_intrinsic(Suite& s) {
  auto eng = make_engine(s.sub(10));
  double worst = 0.0;
  for (int t = 0; t < 10; ++t) {
    FactorPair x{complex_gaussian(6, eng), complex_gaussian(3, eng)};
    TangentPair xi = horizontal_project(x, random_tangent(6, 3, eng));
    RealVector c = to_intrinsic(x, xi);
    TangentPair back = from_intrinsic(x, c);
    double n = std::sqrt(metric_norm2(x, xi)) + 1e-300;
    worst = std::max(worst,
                     std::sqrt(metric_norm2(x, {back.dh - xi.dh, back.dm - xi.dm})) / n);
    worst = std::max(worst, std::abs(c.squaredNorm() - metric_norm2(x, xi)) / (n * n));
    auto basis = build_basis(x);
    for (std::size_t i = 0; i < basis.size(); ++i) {
      RealVector ci = to_intrinsic(x, basis[i]);
      RealVector ei = RealVector::Zero(ci.size());
      ei[static_cast<Eigen::Index>(i)] = 1.0;
      worst = std::max(worst, (ci - ei).norm());
    }
  }
  s.add("intrinsic-roundtrip", worst, 1e-10);
}

void check_quotient_invariance(Suite& s) {
  auto eng = make_engine(s.sub(11));
  int L = 32, K = 6, N = 7;
  MeasurementOperator op(L, make_partial_dft_b(L, K), DenseGaussianC{N, 99});
  FactorPair truth{complex_gaussian(K, eng), complex_gaussian(N, eng)};
  ComplexVector y = op.apply_forward(truth.h, truth.m);
  double dstar = truth.h.norm() * truth.m.norm();
  Objective obj(op, y, PenaltyParams{dstar * dstar / 100.0, dstar, 0.7});

  double worst = 0.0;
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int t = 0; t < 10; ++t) {
    FactorPair x{complex_gaussian(K, eng), complex_gaussian(N, eng)};
    Objective::EvalContext ctx;
    double f = obj.cost(x, ctx);
    FactorPair xb = balance(x);
    Objective::EvalContext ctxb;
    obj.cost(xb, ctxb);
    HorizontalVector g = obj.riemannian_gradient(xb, ctxb);
    double gn = std::sqrt(metric_norm2(xb, g.tangent()));

    Complex p(unif(eng), unif(eng));
    if (std::abs(p) < 1e-3) p = 1.0;
    FactorPair xp{x.h / p, x.m * std::conj(p)};
    Objective::EvalContext ctxp;
    double fp = obj.cost(xp, ctxp);
    worst = std::max(worst, std::abs(fp - f) / (std::abs(f) + 1e-300));

    FactorPair xpb = balance(xp);
    Objective::EvalContext ctxpb;
    obj.cost(xpb, ctxpb);
    HorizontalVector gp = obj.riemannian_gradient(xpb, ctxpb);
    double gnp = std::sqrt(metric_norm2(xpb, gp.tangent()));
    worst = std::max(worst, std::abs(gnp - gn) / (gn + 1e-300));
  }
  s.add("quotient-invariance", worst, 1e-10);
}

void check_gradient_fd(Suite& s) {
  auto eng = make_engine(s.sub(12));
  int L = 32, K = 6, N = 7;
  MeasurementOperator op(L, make_partial_dft_b(L, K), DenseGaussianC{N, 123});
  FactorPair truth{complex_gaussian(K, eng), complex_gaussian(N, eng)};
  ComplexVector y = op.apply_forward(truth.h, truth.m);
  double dstar = truth.h.norm() * truth.m.norm();

  double worst = 0.0;
  for (int variant = 0; variant < 3; ++variant) {
    PenaltyParams pp;
    FactorPair x{complex_gaussian(K, eng), complex_gaussian(N, eng)};
    if (variant == 0) {
      pp = PenaltyParams{0.0, dstar, 1.0};
    } else if (variant == 1) {
      pp = experiment_penalty(dstar, L, K, N);
    } else {
      pp = PenaltyParams{dstar * dstar / 50.0, dstar, 0.25};  // small mu: penalty active
      x.h = ComplexVector::Zero(K);
      x.h[0] = 2.0 * std::sqrt(dstar);  // coherent point
      x.h[1] = Complex(0.1, 0.2);
      x.m *= std::sqrt(dstar) / x.m.norm();
    }
    Objective obj(op, y, pp);
    Objective::EvalContext ctx;
    TangentPair g = obj.euclidean_gradient(x, ctx);
    double xs = std::max({x.h.norm(), x.m.norm(), 1.0});
    for (int dir = 0; dir < 5; ++dir) {
      TangentPair w = random_tangent(K, N, eng);
      double wn = std::sqrt(w.dh.squaredNorm() + w.dm.squaredNorm());
      w.dh /= wn;
      w.dm /= wn;
      double eps = 1e-6 * xs;
      Objective::EvalContext tmp;
      double fp = obj.cost(FactorPair{x.h + eps * w.dh, x.m + eps * w.dm}, tmp);
      tmp.invalidate();
      double fm = obj.cost(FactorPair{x.h - eps * w.dh, x.m - eps * w.dm}, tmp);
      double fd = (fp - fm) / (2.0 * eps);
      double an = (w.dh.dot(g.dh) + w.dm.dot(g.dm)).real();
      worst = std::max(worst, std::abs(fd - an) / (1.0 + std::abs(fd)));
    }
    // Riemannian side at a balanced point
    FactorPair xb = balance(x);
    Objective::EvalContext ctxb;
    HorizontalVector rg = obj.riemannian_gradient(xb, ctxb);
    for (int dir = 0; dir < 3; ++dir) {
      TangentPair eta = horizontal_project(xb, random_tangent(K, N, eng));
      double en = std::sqrt(metric_norm2(xb, eta));
      eta.dh /= en;
      eta.dm /= en;
      double eps = 1e-6 * xs;
      Objective::EvalContext tmp;
      double fp = obj.cost(retract(xb, {eps * eta.dh, eps * eta.dm}), tmp);
      tmp.invalidate();
      double fm = obj.cost(retract(xb, {-eps * eta.dh, -eps * eta.dm}), tmp);
      double fd = (fp - fm) / (2.0 * eps);
      double an = metric(xb, rg.tangent(), eta);
      worst = std::max(worst, std::abs(fd - an) / (1.0 + std::abs(fd)));
    }
  }
  s.add("gradient-fd-consistency", worst, 1e-5);
}

void check_wirtinger_half(Suite& s) {
  auto eng = make_engine(s.sub(13));
  int L = 24, K = 5, N = 4;
  MeasurementOperator op(L, make_partial_dft_b(L, K), DenseGaussianC{N, 5});
  FactorPair truth{complex_gaussian(K, eng), complex_gaussian(N, eng)};
  ComplexVector y = op.apply_forward(truth.h, truth.m);
  FactorPair x{complex_gaussian(K, eng), complex_gaussian(N, eng)};

  Objective obj(op, y, PenaltyParams{0.0, 1.0, 1.0});
  Objective::EvalContext ctx;
  TangentPair full = obj.euclidean_gradient(x, ctx);
  FlatEval fctx;
  TangentPair half = wirtinger_gradient(op, y, x, 0.0, 1.0, 1.0, fctx);
  double scale = std::sqrt(full.dh.squaredNorm() + full.dm.squaredNorm()) + 1e-300;
  double worst = ((half.dh - 0.5 * full.dh).norm() + (half.dm - 0.5 * full.dm).norm()) / scale;
  s.add("wirtinger-half-gradient", worst, 1e-12);
}

void check_hessian_bounds(Suite& s) {
  auto eng = make_engine(s.sub(14));
  const int K = 20, N = 20, L = 400;
  MeasurementOperator op(L, make_partial_dft_b(L, K), DenseGaussianC{N, s.sub(41)});
  FactorPair truth = balance({complex_gaussian(K, eng), complex_gaussian(N, eng)});
  ComplexVector y = op.apply_forward(truth.h, truth.m);
  double dstar = truth.h.norm() * truth.m.norm();
  Objective obj(op, y, PenaltyParams{0.0, dstar, 1.0});
  Objective::EvalContext ctx;
  obj.cost(truth, ctx);

  const double lo = 1.8 * dstar * dstar - 0.05 * dstar * dstar;
  const double hi = 4.4 * dstar * dstar + 0.05 * dstar * dstar;
  int in_band = 0;
  const int dirs = 1000;
  for (int t = 0; t < dirs; ++t) {
    TangentPair eta = horizontal_project(truth, random_tangent(K, N, eng));
    // the [9/5, 22/5] d*^2 band normalizes eta by the inverse-weighted lift
    // norm (||eta_h||^2 + ||eta_m||^2)/d*, which equals g/d*^2 at the
    // balanced solution
    double gn2 = metric_norm2(truth, eta) / (dstar * dstar);
    double q = obj.hessian_quadratic_form(truth, eta, ctx);
    double rayleigh = q / gn2;
    if (rayleigh >= lo && rayleigh <= hi) ++in_band;
  }
  s.add("hessian-eigenvalue-band", static_cast<double>(in_band) / dirs, 0.99,
        /*larger_is_fail=*/false, "Rayleigh quotients within [1.8,4.4] d*^2 (+-0.05 d*^2)");
}

void check_penalty_inactive(Suite& s) {
  auto eng = make_engine(s.sub(15));
  int L = 64, K = 8, N = 6;
  MeasurementOperator op(L, make_partial_dft_b(L, K), DenseGaussianC{N, 17});
  // h = c e_1 has a flat DFT spectrum: sqrt(L)||Bh||inf ||m|| = ||h|| ||m||,
  // well inside Omega_{mu/2} for mu >= 1
  ComplexVector h = ComplexVector::Zero(K);
  h[0] = 1.3;
  ComplexVector m = complex_gaussian(N, eng);
  m *= 1.3 / m.norm();
  FactorPair x{h, m};
  double dstar = x.h.norm() * x.m.norm();
  Objective obj(op, op.apply_forward(x.h, x.m), PenaltyParams{dstar * dstar / 100.0, dstar, 1.0});
  double pen = obj.penalty_value(x);
  Objective::EvalContext ctx;
  double cost = obj.cost(x, ctx);
  s.add("penalty-inactive-near-solution", std::max(pen, cost), 1e-20,
        /*larger_is_fail=*/true, "penalty and cost at an incoherent noiseless solution");
}

void check_balance_product(Suite& s) {
  auto eng = make_engine(s.sub(16));
  double worst = 0.0;
  for (int t = 0; t < 10; ++t) {
    FactorPair x{complex_gaussian(7, eng), complex_gaussian(5, eng)};
    x.h *= std::exp(3.0 * std::uniform_real_distribution<double>(-1, 1)(eng));
    FactorPair b = balance(x);
    double prod = x.h.norm() * x.m.norm();
    worst = std::max(worst, frob(x, b) / prod);
    worst = std::max(worst, std::abs(b.h.norm() - b.m.norm()) / b.h.norm());
  }
  s.add("balance-preserves-product", worst, 1e-12);
}

void check_bb_paths(Suite& s) {
  auto eng = make_engine(s.sub(17));
  double worst = 0.0;
  for (int t = 0; t < 10; ++t) {
    FactorPair x = balance({complex_gaussian(6, eng), complex_gaussian(5, eng)});
    TangentPair g0 = horizontal_project(x, random_tangent(6, 5, eng));
    TangentPair eta{-0.3 * g0.dh, -0.3 * g0.dm};
    FactorPair x1 = retract(x, eta);
    TangentPair g1 = horizontal_project(x1, random_tangent(6, 5, eng));

    double a_coords = bb_initial_step(x, g0, eta, x1, g1, 0.777, 1.0);

    TangentPair ts = transport(x, eta, eta);
    TangentPair tg = transport(x, eta, g0);
    TangentPair yv{g1.dh - tg.dh, g1.dm - tg.dm};
    double yy = metric_norm2(x1, yv);
    double a_ext = yy <= 1e-30 ? 0.777 : metric(x1, ts, yv) / yy;
    if (a_ext <= 0.0 || a_ext > 1e6) a_ext = 0.777;
    worst = std::max(worst, std::abs(a_coords - a_ext) / (std::abs(a_ext) + 1e-300));
  }
  s.add("bb-intrinsic-extrinsic", worst, 1e-10);
}

void check_solver_properties(Suite& s) {
  const int K = 20, N = 20, L = 200;
  MeasurementOperator op(L, make_partial_dft_b(L, K), DenseGaussianC{N, s.sub(42)});
  auto eng = make_engine(s.sub(18));
  FactorPair truth{complex_gaussian(K, eng), complex_gaussian(N, eng)};
  double dstar = truth.h.norm() * truth.m.norm();
  ComplexVector y = op.apply_forward(truth.h, truth.m);
  double mu = default_mu(L, K, N);

  InitResult init = spectral_init(op, y, mu, 1e-10, 500, s.sub(43));
  Objective obj(op, y, experiment_penalty(init.d, L, K, N));
  SolverConfig cfg;
  cfg.record_iterates = true;
  cfg.max_iter = 500;
  SolverReport rep = rsd_solve(obj, init.x0, init.d, cfg);

  // sufficient decrease of every accepted Armijo step
  double sd_worst = 0.0;
  for (std::size_t k = 0; k + 1 < rep.cost_history.size(); ++k) {
    double lhs = rep.cost_history[k + 1];
    double rhs = rep.cost_history[k] -
                 cfg.armijo_c * rep.accepted_steps[k] * rep.gradnorm2_history[k];
    sd_worst = std::max(sd_worst, (lhs - rhs) / (1.0 + std::abs(rep.cost_history[k])));
  }
  s.add("armijo-sufficient-decrease", sd_worst, 1e-12);
  s.add("counters-nbh-equals-ncm",
        std::abs(static_cast<double>(rep.ops.bh - rep.ops.cm)), 0);
  s.add("robb-converges-noiseless", rmse(rep.x, truth), 1e-7);

  // representation independence under a random complex rescaling
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Complex p(0.6 + unif(eng), unif(eng));
  FactorPair x0p{init.x0.h / p, init.x0.m * std::conj(p)};
  SolverReport rep2 = rsd_solve(obj, x0p, init.d, cfg);
  double ri_worst = 0.0;
  std::size_t n = std::min(rep.iterates.size(), rep2.iterates.size());
  for (std::size_t k = 0; k < n; ++k)
    ri_worst = std::max(ri_worst, frob(rep.iterates[k], rep2.iterates[k]) / dstar);
  s.add("representation-independence", ri_worst, 1e-8);

  // AMA monotonicity on the same instance
  SolverConfig acfg;
  acfg.max_iter = 300;
  SolverReport arep = ama_solve(op, y, init.x0, acfg);
  double mono_worst = 0.0;
  double prev = arep.cost_history.front();
  for (double f : arep.half_step_costs) {
    mono_worst = std::max(mono_worst, (f - prev) / (std::abs(prev) + 1e-300));
    prev = f;
  }
  s.add("ama-monotone-half-steps", mono_worst, 1e-12);
}

void check_haar(Suite& s) {
  auto eng = make_engine(s.sub(19));
  RealMatrix img(16, 16);
  std::normal_distribution<double> g;
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 16; ++j) img(i, j) = g(eng);
  RealMatrix co = haar_analysis(img);
  RealMatrix back = haar_synthesis(co);
  double worst = (back - img).norm() / img.norm();
  worst = std::max(worst, std::abs(co.squaredNorm() - img.squaredNorm()) / img.squaredNorm());
  RealMatrix flat = RealMatrix::Constant(8, 8, 0.37);
  RealMatrix cflat = haar_analysis(flat);
  int nonzeros = 0;
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j)
      if (std::abs(cflat(i, j)) > 1e-14) ++nonzeros;
  worst = std::max(worst, std::abs(nonzeros - 1.0));
  s.add("haar-orthonormal", worst, 1e-12);
}

void check_noise_snr(Suite& s) {
  double signal = 3.7;
  double tau = 0.05;
  ComplexVector e = make_noise(NoiseModel{tau, s.sub(20)}, 512, signal);
  double snr = signal * signal / e.squaredNorm();
  s.add("noise-snr-scaling", std::abs(snr - 1.0 / (tau * tau)) / (1.0 / (tau * tau)), 1e-12);
}

void check_power_vs_svd(Suite& s) {
  auto eng = make_engine(s.sub(21));
  int L = 12, K = 5, N = 4;
  MeasurementOperator op(L, make_partial_dft_b(L, K), DenseGaussianC{N, 21});
  ComplexVector y = complex_gaussian(L, eng);
  SingularTriple trip = leading_singular_triple(op, y, 1e-12, 2000, s.sub(44));
  ComplexMatrix m = op.apply_adjoint(y);
  Eigen::JacobiSVD<ComplexMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  double sigma = svd.singularValues()[0];
  double worst = std::abs(trip.d - sigma) / sigma;
  worst = std::max(worst, 1.0 - std::abs(svd.matrixU().col(0).dot(trip.left)));
  worst = std::max(worst, 1.0 - std::abs(svd.matrixV().col(0).dot(trip.right)));
  s.add("power-iteration-vs-svd", worst, 1e-8);
}

}  // namespace

std::vector<CheckResult> run_invariant_suite(std::uint64_t seed) {
  Suite s{seed, {}};
  auto guarded = [&s](const char* name, void (*fn)(Suite&)) {
    try {
      fn(s);
    } catch (const std::exception& e) {
      CheckResult r;
      r.name = name;
      r.pass = false;
      r.value = std::numeric_limits<double>::quiet_NaN();
      r.detail = std::string("exception: ") + e.what();
      s.results.push_back(r);
    }
  };
  guarded("adjoint-identity", check_adjoint_identity);
  guarded("fft-path-equals-dense", check_fft_vs_dense);
  guarded("b-structure", check_b_structure);
  guarded("counter-exactness", check_counters);
  guarded("local-rip", check_local_rip);
  guarded("metric-invariance", check_metric_invariance);
  guarded("projection-algebra", check_projection_algebra);
  guarded("horizontal-basis-orthonormal", check_basis);
  guarded("retraction-axioms", check_retraction);
  guarded("transport-axioms", check_transport);
  guarded("intrinsic-roundtrip", check_intrinsic);
  guarded("quotient-invariance", check_quotient_invariance);
  guarded("gradient-fd-consistency", check_gradient_fd);
  guarded("wirtinger-half-gradient", check_wirtinger_half);
  guarded("hessian-eigenvalue-band", check_hessian_bounds);
  guarded("penalty-inactive-near-solution", check_penalty_inactive);
  guarded("balance-preserves-product", check_balance_product);
  guarded("bb-intrinsic-extrinsic", check_bb_paths);
  guarded("solver-properties", check_solver_properties);
  guarded("haar-orthonormal", check_haar);
  guarded("noise-snr-scaling", check_noise_snr);
  guarded("power-iteration-vs-svd", check_power_vs_svd);
  return s.results;
}

bool all_passed(const std::vector<CheckResult>& results) {
  for (const auto& r : results)
    if (!r.pass) return false;
  return true;
}

std::string check_report_json(const std::vector<CheckResult>& results) {
  std::string out = "{\n  \"checks\": [\n";
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    out += "    {\"name\": \"" + r.name + "\", \"pass\": " + (r.pass ? "true" : "false") +
           ", \"value\": " + format_double(r.value) +
           ", \"threshold\": " + format_double(r.threshold);
    if (!r.detail.empty()) out += ", \"detail\": \"" + r.detail + "\"";
    out += i + 1 < results.size() ? "},\n" : "}\n";
  }
  out += "  ],\n  \"all_passed\": ";
  out += all_passed(results) ? "true" : "false";
  out += "\n}\n";
  return out;
}

}  // namespace bdq
