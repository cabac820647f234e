#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bdq/solvers.hpp"
#include "bdq/rng.hpp"

using namespace bdq;

namespace {

struct Instance {
  MeasurementOperator op;
  FactorPair truth;
  ComplexVector y;
  double dstar;
  double mu;
  Instance(int L, int K, int N, std::uint64_t seed)
      : op(L, make_partial_dft_b(L, K), DenseGaussianC{N, derive_seed(seed, {1})}) {
    auto eng = make_engine(derive_seed(seed, {2}));
    truth = FactorPair{complex_gaussian(K, eng), complex_gaussian(N, eng)};
    y = op.apply_forward(truth.h, truth.m);
    dstar = truth.h.norm() * truth.m.norm();
    mu = 6.0 * std::sqrt(double(L) / (K + N)) / std::log(double(L));
  }
};

// dense product gap: accurate to machine precision even when the factors
// nearly coincide (the O(K+N) inner-product identity loses half the digits
// to cancellation there)
double frob_product_gap(const FactorPair& a, const FactorPair& b) {
  return (a.h * a.m.adjoint() - b.h * b.m.adjoint()).norm();
}

}  // namespace

TEST_CASE("coherence projection") {
  auto eng = make_engine(31);
  SUBCASE("feasible points are untouched") {
    MeasurementOperator op(32, make_partial_dft_b(32, 6), DenseGaussianC{2, 1});
    ComplexVector z = ComplexVector::Zero(6);
    z[0] = Complex(1.0, -0.5);  // flat spectrum
    ComplexVector w = op.apply_b(z);
    double bound = 1.5 * std::sqrt(32.0) * w.cwiseAbs().maxCoeff();
    ComplexVector out = coherence_project(z, bound, op);
    CHECK((out - z).norm() == 0.0);
  }
  SUBCASE("square unitary B: matches the exact convex projection") {
    const int L = 16;
    MeasurementOperator op(L, make_partial_dft_b(L, L), DenseGaussianC{2, 2});
    ComplexVector z = complex_gaussian(L, eng) * 3.0;
    ComplexVector w = op.apply_b(z);
    double bound = 0.6 * std::sqrt(double(L)) * w.cwiseAbs().maxCoeff();
    ComplexVector got = coherence_project(z, bound, op);
    // oracle: clip in measurement coordinates, map back with the inverse
    double cap = bound / std::sqrt(double(L));
    ComplexVector clipped = w;
    for (int i = 0; i < L; ++i)
      if (std::abs(w[i]) > cap) clipped[i] = w[i] * (cap / std::abs(w[i]));
    ComplexVector want = op.apply_b_adjoint(clipped);
    CHECK((got - want).norm() <= 1e-8 * want.norm());
    // optimality of the oracle: any feasible candidate is no closer
    ComplexVector w2 = op.apply_b(got);
    CHECK(std::sqrt(double(L)) * w2.cwiseAbs().maxCoeff() <= bound + 1e-9);
  }
  SUBCASE("always feasible after projection, never worse than the one-shot clip") {
    MeasurementOperator op(64, make_partial_dft_b(64, 9), DenseGaussianC{2, 3});
    for (int t = 0; t < 100; ++t) {
      ComplexVector z = complex_gaussian(9, eng) * 4.0;
      ComplexVector w = op.apply_b(z);
      double peak = std::sqrt(64.0) * w.cwiseAbs().maxCoeff();
      double bound = 0.5 * peak;
      ComplexVector out = coherence_project(z, bound, op);
      ComplexVector wout = op.apply_b(out);
      CHECK(std::sqrt(64.0) * wout.cwiseAbs().maxCoeff() <= bound + 1e-9);
      // distance no worse than the crude global rescale candidate
      ComplexVector rescale = z * (bound / peak);
      CHECK((out - z).norm() <= (rescale - z).norm() + 1e-12);
    }
  }
}

TEST_CASE("spectral initialization") {
  Instance inst(200, 20, 20, 200);
  SUBCASE("inactive constraint returns sqrt(d) times the singular vectors") {
    SingularTriple trip = leading_singular_triple(inst.op, inst.y, 1e-10, 500, 5);
    double sd = std::sqrt(trip.d);
    ComplexVector bh = inst.op.apply_b(ComplexVector(sd * trip.left));
    double peak = std::sqrt(200.0) * bh.cwiseAbs().maxCoeff();
    double bound = 2.0 * sd * inst.mu;
    REQUIRE(peak <= bound);  // Gaussian-like singular vector: typically feasible
    InitResult init = spectral_init(inst.op, inst.y, inst.mu, 1e-10, 500, 5);
    CHECK(init.d == trip.d);
    // balanced representative of (sqrt(d) h0~, sqrt(d) m0~)
    CHECK(init.x0.h.norm() == doctest::Approx(init.x0.m.norm()).epsilon(1e-12));
    CHECK(frob_product_gap(init.x0, FactorPair{ComplexVector(sd * trip.left),
                                               ComplexVector(sd * trip.right)}) <=
          1e-10 * trip.d);
  }
  SUBCASE("projected initialization is always feasible") {
    // Balancing rescales the factors but preserves the quotient-invariant
    // coherence product sqrt(L)||Bh||inf ||m||, so feasibility is asserted in
    // that form: bound 2 sqrt(d) mu for h0 times ||m0|| = sqrt(d).
    for (int t = 0; t < 20; ++t) {
      Instance small(96, 12, 10, derive_seed(300, {(std::uint64_t)t}));
      double tight_mu = 0.35;  // force the projection to act sometimes
      InitResult init = spectral_init(small.op, small.y, tight_mu, 1e-10, 500, t);
      ComplexVector bh = small.op.apply_b(init.x0.h);
      double product = std::sqrt(96.0) * bh.cwiseAbs().maxCoeff() * init.x0.m.norm();
      CHECK(product <= 2.0 * init.d * tight_mu * (1.0 + 1e-9) + 1e-9);
      CHECK(std::isfinite(init.d));
    }
  }
}

TEST_CASE("rsd solver") {
  SUBCASE("ground-truth start terminates immediately") {
    Instance inst(80, 8, 8, 201);
    Objective obj(inst.op, inst.y, experiment_penalty(inst.dstar, 80, 8, 8));
    SolverConfig cfg;
    SolverReport rep = rsd_solve(obj, inst.truth, inst.dstar, cfg);
    CHECK(rep.iterations == 0);
    CHECK(rep.reason == Termination::Converged);
    CHECK(rep.relres_history.back() <= 1e-12);
  }
  SUBCASE("one balanced step of (BD:e33) equals the projected-gradient step") {
    Instance inst(80, 8, 8, 202);
    auto eng = make_engine(33);
    Objective obj(inst.op, inst.y, experiment_penalty(inst.dstar, 80, 8, 8));
    FactorPair x = balance(FactorPair{complex_gaussian(8, eng), complex_gaussian(8, eng)});
    double dk = x.h.norm() * x.m.norm();
    Objective::EvalContext ctx;
    TangentPair g = obj.euclidean_gradient(x, ctx);
    double alpha = 0.37;
    // route 1: scaled Euclidean update
    FactorPair r1{x.h - (alpha / dk) * g.dh, x.m - (alpha / dk) * g.dm};
    // route 2: Riemannian update with explicit horizontal projection
    TangentPair scaled{g.dh / x.m.squaredNorm(), g.dm / x.h.squaredNorm()};
    TangentPair proj = horizontal_project(x, scaled);
    FactorPair r2 = retract(x, {-alpha * proj.dh, -alpha * proj.dm});
    CHECK((r1.h - r2.h).norm() <= 1e-12 * r1.h.norm());
    CHECK((r1.m - r2.m).norm() <= 1e-12 * r1.m.norm());
  }
  SUBCASE("noiseless instance converges from the spectral start") {
    Instance inst(200, 20, 20, 203);
    InitResult init = spectral_init(inst.op, inst.y, inst.mu, 1e-10, 500, 7);
    Objective obj(inst.op, inst.y, experiment_penalty(init.d, 200, 20, 20));
    SolverConfig cfg;
    SolverReport rep = rsd_solve(obj, init.x0, init.d, cfg);
    CHECK(rep.reason == Termination::Converged);
    CHECK(rmse(rep.x, inst.truth) <= 1e-7);
    CHECK(rep.ops.bh == rep.ops.cm);  // Table-style counter identity
    // every accepted step satisfied the Armijo inequality
    for (std::size_t k = 0; k + 1 < rep.cost_history.size(); ++k) {
      CHECK(rep.cost_history[k + 1] <=
            rep.cost_history[k] -
                cfg.armijo_c * rep.accepted_steps[k] * rep.gradnorm2_history[k] +
                1e-12 * (1.0 + std::abs(rep.cost_history[k])));
    }
  }
  SUBCASE("representative rescaling leaves the product sequence unchanged") {
    Instance inst(200, 20, 20, 204);
    InitResult init = spectral_init(inst.op, inst.y, inst.mu, 1e-10, 500, 8);
    Objective obj(inst.op, inst.y, experiment_penalty(init.d, 200, 20, 20));
    SolverConfig cfg;
    cfg.record_iterates = true;
    SolverReport r1 = rsd_solve(obj, init.x0, init.d, cfg);
    Complex p(0.8, -1.7);
    FactorPair x0p{init.x0.h / p, init.x0.m * std::conj(p)};
    SolverReport r2 = rsd_solve(obj, x0p, init.d, cfg);
    REQUIRE(r1.iterates.size() == r2.iterates.size());
    for (std::size_t k = 0; k < r1.iterates.size(); ++k)
      CHECK(frob_product_gap(r1.iterates[k], r2.iterates[k]) <= 1e-8 * inst.dstar);
  }
  SUBCASE("fixed small step converges linearly after burn-in") {
    Instance inst(400, 20, 20, 205);
    InitResult init = spectral_init(inst.op, inst.y, inst.mu, 1e-10, 500, 9);
    Objective obj(inst.op, inst.y, experiment_penalty(init.d, 400, 20, 20));
    SolverConfig cfg;
    cfg.step_policy = StepPolicy::Fixed;
    cfg.fixed_step = 0.5 / (4.4 * init.d * init.d);  // inside the stable band
    cfg.max_iter = 1500;
    cfg.record_iterates = true;
    SolverReport rep = rsd_solve(obj, init.x0, init.d, cfg);
    std::vector<double> logerr;
    for (const auto& it : rep.iterates) {
      double e = frob_product_gap(it, inst.truth);
      if (e > 1e-12 * inst.dstar) logerr.push_back(std::log10(e));
    }
    REQUIRE(logerr.size() > 200);
    // monotone after burn-in and an asymptotically constant per-step drop
    std::size_t burn = logerr.size() / 4;
    for (std::size_t k = burn; k + 1 < logerr.size(); ++k) CHECK(logerr[k + 1] <= logerr[k] + 1e-9);
    std::vector<double> drops;
    for (std::size_t k = logerr.size() / 2; k + 1 < logerr.size(); ++k)
      drops.push_back(logerr[k] - logerr[k + 1]);
    double mean = 0.0;
    for (double d : drops) mean += d;
    mean /= drops.size();
    CHECK(mean > 0.0);
    for (double d : drops) CHECK(std::abs(d - mean) <= 0.5 * mean + 1e-6);
  }
}

TEST_CASE("bb initial step") {
  auto eng = make_engine(34);
  FactorPair x = balance(FactorPair{complex_gaussian(6, eng), complex_gaussian(5, eng)});
  TangentPair g0 = horizontal_project(x, {complex_gaussian(6, eng), complex_gaussian(5, eng)});
  TangentPair eta{-0.2 * g0.dh, -0.2 * g0.dm};
  FactorPair x1 = retract(x, eta);
  SUBCASE("quadratic model: gradient changing linearly along the step") {
    double lambda = 3.7;  // model Hessian; the exact minimizer step is 1/lambda
    RealVector c0 = to_intrinsic(x, g0);
    RealVector ce = to_intrinsic(x, eta);
    TangentPair g1 = from_intrinsic(x1, RealVector(c0 + lambda * ce));
    double a = bb_initial_step(x, g0, eta, x1, g1, 0.123, 1.0);
    CHECK(a == doctest::Approx(1.0 / lambda).epsilon(1e-8));
  }
  SUBCASE("unchanged gradient falls back without dividing by zero") {
    TangentPair g1 = from_intrinsic(x1, to_intrinsic(x, g0));
    double a = bb_initial_step(x, g0, eta, x1, g1, 0.123, 1.0);
    CHECK(a == 0.123);
  }
  SUBCASE("negative curvature falls back") {
    RealVector c0 = to_intrinsic(x, g0);
    RealVector ce = to_intrinsic(x, eta);
    TangentPair g1 = from_intrinsic(x1, RealVector(c0 - 2.0 * ce));
    CHECK(bb_initial_step(x, g0, eta, x1, g1, 0.321, 1.0) == 0.321);
  }
  SUBCASE("intrinsic computation equals the extrinsic transport route") {
    TangentPair g1 = horizontal_project(x1, {complex_gaussian(6, eng), complex_gaussian(5, eng)});
    double a_coords = bb_initial_step(x, g0, eta, x1, g1, 0.5, 1.0);
    TangentPair ts = transport(x, eta, eta);
    TangentPair tg = transport(x, eta, g0);
    TangentPair yv{g1.dh - tg.dh, g1.dm - tg.dm};
    double a_ext = metric(x1, ts, yv) / metric(x1, yv, yv);
    CHECK(a_coords == doctest::Approx(a_ext).epsilon(1e-10));
  }
}

TEST_CASE("wirtinger baseline") {
  SUBCASE("ground truth with inactive penalty is a fixed point") {
    auto eng = make_engine(35);
    MeasurementOperator op(64, make_partial_dft_b(64, 8), DenseGaussianC{6, 4});
    FactorPair truth;
    truth.h = ComplexVector::Zero(8);
    truth.h[0] = 1.2;
    truth.h[3] = Complex(0.2, 0.2);
    truth.m = complex_gaussian(6, eng);
    truth.m *= truth.h.norm() / truth.m.norm();  // balanced so the norm hinges stay off
    ComplexVector y = op.apply_forward(truth.h, truth.m);
    double d = truth.h.norm() * truth.m.norm();
    SolverConfig cfg;
    SolverReport rep = wirtinger_solve(op, y, truth, d, 2.0, d * d / 100.0, cfg,
                                       WirtingerVariant::FixedInitStep);
    CHECK(rep.iterations == 0);
    CHECK(rep.reason == Termination::Converged);
  }
  SUBCASE("three-term penalty gradient matches finite differences") {
    auto eng = make_engine(36);
    MeasurementOperator op(48, make_partial_dft_b(48, 6), DenseGaussianC{5, 5});
    FactorPair truth{complex_gaussian(6, eng), complex_gaussian(5, eng)};
    ComplexVector y = op.apply_forward(truth.h, truth.m);
    double d = truth.h.norm() * truth.m.norm();
    // oversized coherent factors so all three hinge terms are active
    FactorPair x;
    x.h = ComplexVector::Zero(6);
    x.h[0] = 2.5 * std::sqrt(d);
    x.h[1] = Complex(0.3, -0.8);
    auto eng2 = make_engine(37);
    x.m = complex_gaussian(5, eng2);
    x.m *= 2.2 * std::sqrt(d) / x.m.norm();
    double rho = d * d / 30.0, mu = 0.2;
    FlatEval ctx;
    double f0 = wirtinger_cost(op, y, x, rho, d, mu, ctx);
    CHECK(f0 > (op.apply_forward(x.h, x.m) - y).squaredNorm());  // penalty indeed active
    TangentPair gw = wirtinger_gradient(op, y, x, rho, d, mu, ctx);
    for (int dir = 0; dir < 6; ++dir) {
      ComplexVector wh = complex_gaussian(6, eng2);
      ComplexVector wm = complex_gaussian(5, eng2);
      double wn = std::sqrt(wh.squaredNorm() + wm.squaredNorm());
      wh /= wn;
      wm /= wn;
      double eps = 1e-6 * std::max(1.0, std::sqrt(d));
      FlatEval tmp;
      double fp = wirtinger_cost(op, y, {x.h + eps * wh, x.m + eps * wm}, rho, d, mu, tmp);
      tmp.invalidate();
      double fm = wirtinger_cost(op, y, {x.h - eps * wh, x.m - eps * wm}, rho, d, mu, tmp);
      double fd = (fp - fm) / (2 * eps);
      // Wirtinger derivative is half the Euclidean gradient
      double an = 2.0 * (wh.dot(gw.dh) + wm.dot(gw.dm)).real();
      CHECK(std::abs(fd - an) <= 1e-5 * (1.0 + std::abs(fd)));
    }
  }
  SUBCASE("NCBB converges on an easy noiseless instance") {
    Instance inst(200, 20, 20, 206);
    InitResult init = spectral_init(inst.op, inst.y, inst.mu, 1e-10, 500, 11);
    SolverConfig cfg;
    SolverReport rep = wirtinger_solve(inst.op, inst.y, init.x0, init.d, inst.mu,
                                       init.d * init.d / 100.0, cfg,
                                       WirtingerVariant::BBInitStep);
    CHECK(rep.reason == Termination::Converged);
    CHECK(rmse(rep.x, inst.truth) <= 1e-7);
    CHECK(rep.ops.bh == rep.ops.cm);
  }
}

TEST_CASE("alternating minimization") {
  SUBCASE("ground truth start terminates at once") {
    Instance inst(80, 8, 8, 207);
    SolverConfig cfg;
    SolverReport rep = ama_solve(inst.op, inst.y, inst.truth, cfg);
    CHECK(rep.iterations == 0);
    CHECK(rep.reason == Termination::Converged);
  }
  SUBCASE("exact line search: the closed-form step is the 1-D minimizer") {
    Instance inst(80, 8, 8, 208);
    auto eng = make_engine(38);
    FactorPair x{complex_gaussian(8, eng), complex_gaussian(8, eng)};
    ComplexVector u = inst.op.apply_b(x.h);
    ComplexVector v = inst.op.apply_c(x.m);
    ComplexVector r = u.cwiseProduct(v.conjugate()) - inst.y;
    ComplexVector gm = inst.op.apply_c_adjoint(2.0 * r.conjugate().cwiseProduct(u));
    ComplexVector cg = inst.op.apply_c(gm);
    ComplexVector q = u.cwiseProduct(cg.conjugate());
    double tstar = gm.squaredNorm() / (2.0 * q.squaredNorm());
    auto F = [&](double t) {
      return (inst.op.apply_forward(x.h, ComplexVector(x.m - t * gm)) - inst.y).squaredNorm();
    };
    double f0 = (u.cwiseProduct(v.conjugate()) - inst.y).squaredNorm();
    double fs = F(tstar);
    CHECK(fs < f0);
    CHECK(F(0.9 * tstar) > fs);
    CHECK(F(1.1 * tstar) > fs);
  }
  SUBCASE("monotone residual history and convergence") {
    Instance inst(240, 20, 20, 209);
    InitResult init = spectral_init(inst.op, inst.y, inst.mu, 1e-10, 500, 12);
    SolverConfig cfg;
    SolverReport rep = ama_solve(inst.op, inst.y, init.x0, cfg);
    CHECK(rep.reason == Termination::Converged);
    CHECK(rmse(rep.x, inst.truth) <= 1e-7);
    double prev = rep.cost_history.front();
    for (double f : rep.half_step_costs) {
      CHECK(f <= prev * (1.0 + 1e-12) + 1e-300);
      prev = f;
    }
    for (std::size_t k = 0; k + 1 < rep.relres_history.size(); ++k)
      CHECK(rep.relres_history[k + 1] <= rep.relres_history[k] * (1.0 + 1e-12));
    CHECK(rep.ops.fft == 2 * rep.ops.bh);  // 4 FFTs and 2 of each multiplication per sweep
  }
}
