#include "bdq/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "bdq/kernels.hpp"

namespace bdq {

const char* termination_name(Termination t) {
  switch (t) {
    case Termination::Converged:
      return "converged";
    case Termination::GradientRatio:
      return "gradient_ratio";
    case Termination::MaxIterations:
      return "max_iterations";
    case Termination::Stalled:
      return "stalled";
  }
  return "unknown";
}

void validate_config(const SolverConfig& cfg) {
  require(cfg.max_iter >= 1, "config: max_iter must be positive");
  require(cfg.rel_residual_tol > 0.0, "config: residual tolerance must be positive");
  require(cfg.shrink > 0.0 && cfg.shrink < 1.0, "config: shrink factor must be in (0,1)");
  require(cfg.armijo_c > 0.0 && cfg.armijo_c < 1.0, "config: armijo constant must be in (0,1)");
  require(cfg.max_backtracks >= 1, "config: max_backtracks must be positive");
  if (cfg.step_policy == StepPolicy::Fixed)
    require(cfg.fixed_step > 0.0, "config: fixed step must be positive");
}

double rmse(const FactorPair& x, const FactorPair& truth) {
  double a = x.h.norm() * x.m.norm();
  double b = truth.h.norm() * truth.m.norm();
  Complex cross = x.h.dot(truth.h) * truth.m.dot(x.m);  // <h m^*, h# m#^*>_F conj'd pieces
  double f2 = a * a + b * b - 2.0 * cross.real();
  return std::sqrt(std::max(f2, 0.0)) / b;
}

ComplexVector coherence_project(const ComplexVector& z, double bound,
                                const MeasurementOperator& op) {
  require(bound > 0.0, "coherence_project: bound must be positive");
  require(z.size() == op.K(), "coherence_project: z must have length K");
  const double sqrtL = std::sqrt(static_cast<double>(op.L()));
  const double cap = bound / sqrtL;

  ComplexVector out = z;
  ComplexVector w = op.apply_b(out);
  for (int sweep = 0; sweep < 50; ++sweep) {
    double peak = w.cwiseAbs().maxCoeff();
    if (sqrtL * peak <= bound * (1.0 + 1e-12)) return out;
    ComplexVector excess(w.size());
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      double a = std::abs(w[i]);
      excess[i] = a > cap ? w[i] * ((a - cap) / a) : Complex(0.0, 0.0);
    }
    out -= op.apply_b_adjoint(excess);
    w = op.apply_b(out);
  }
  double peak = sqrtL * w.cwiseAbs().maxCoeff();
  if (peak > bound) out *= bound / peak;
  return out;
}

InitResult spectral_init(const MeasurementOperator& op, const ComplexVector& y, double mu,
                         double tol, int max_iter, std::uint64_t seed) {
  require(mu > 0.0, "spectral_init: mu must be positive");
  CounterSnapshot before = op.counters().snapshot();
  SingularTriple trip = leading_singular_triple(op, y, tol, max_iter, seed);
  double sd = std::sqrt(trip.d);
  ComplexVector m0 = sd * trip.right;
  ComplexVector h0 = coherence_project(sd * trip.left, 2.0 * sd * mu, op);
  InitResult res;
  res.x0 = balance(FactorPair{std::move(h0), std::move(m0)});
  res.d = trip.d;
  res.ops = op.counters().snapshot() - before;
  res.power_iterations = trip.iterations;
  return res;
}

namespace {

double bb_quotient(const RealVector& s, const RealVector& yv, double fallback, double d) {
  double yy = yv.squaredNorm();
  if (yy <= 1e-30) return fallback;
  double q = s.dot(yv) / yy;
  if (q <= 0.0 || q > 1e6 / d) return fallback;
  return q;
}

double euclidean_bb(const ComplexVector& sh, const ComplexVector& sm, const ComplexVector& yh,
                    const ComplexVector& ym, double fallback, double d) {
  double yy = yh.squaredNorm() + ym.squaredNorm();
  if (yy <= 1e-30) return fallback;
  double q = (sh.dot(yh) + sm.dot(ym)).real() / yy;
  if (q <= 0.0 || q > 1e6 / d) return fallback;
  return q;
}

}  // namespace

double bb_initial_step(const FactorPair& xk, const TangentPair& grad_k, const TangentPair& eta_k,
                       const FactorPair& xk1, const TangentPair& grad_k1, double fallback,
                       double d) {
  RealVector s = to_intrinsic(xk, eta_k);  // transport is the coordinate identity
  RealVector yv = to_intrinsic(xk1, grad_k1) - to_intrinsic(xk, grad_k);
  return bb_quotient(s, yv, fallback, d);
}

SolverReport rsd_solve(const Objective& obj, const FactorPair& x0, double d,
                       const SolverConfig& cfg) {
  validate_config(cfg);
  validate_factor_pair(x0);
  require(d > 0.0, "rsd_solve: d must be positive");

  const MeasurementOperator& op = obj.op();
  CounterSnapshot before = op.counters().snapshot();

  SolverReport rep;
  FactorPair x = balance(x0);
  Objective::EvalContext ctx;
  double f = obj.cost(x, ctx);
  double relres = obj.relative_residual(ctx);
  rep.relres_history.push_back(relres);
  rep.cost_history.push_back(f);
  if (cfg.record_iterates) rep.iterates.push_back(x);

  if (relres <= cfg.rel_residual_tol) {
    rep.x = std::move(x);
    rep.reason = Termination::Converged;
    rep.ops = op.counters().snapshot() - before;
    return rep;
  }

  const double default_init = cfg.backtracking_init > 0.0 ? cfg.backtracking_init : 1.0 / d;
  double prev_step = default_init;
  double grad0_norm = -1.0;
  std::optional<RealVector> prev_s_coords;   // coords of the accepted displacement
  std::optional<RealVector> prev_g_coords;   // coords of the gradient at the old point
  rep.reason = Termination::MaxIterations;

  for (int k = 0; k < cfg.max_iter; ++k) {
    HorizontalVector grad = obj.riemannian_gradient(x, ctx);
    TangentPair gt = grad.tangent();
    double gn2 = metric_norm2(x, gt);
    rep.gradnorm2_history.push_back(gn2);
    double gn = std::sqrt(std::max(gn2, 0.0));
    if (grad0_norm < 0.0) grad0_norm = gn;

    if (cfg.grad_ratio_tol > 0.0 && grad0_norm > 0.0 && gn <= cfg.grad_ratio_tol * grad0_norm) {
      rep.reason = Termination::GradientRatio;
      break;
    }
    if (gn2 <= 0.0) {
      rep.reason = relres <= cfg.rel_residual_tol ? Termination::Converged : Termination::Stalled;
      break;
    }

    double alpha0 = default_init;
    RealVector g_coords;
    bool have_coords = false;
    if (cfg.step_policy == StepPolicy::BBBacktracking) {
      g_coords = to_intrinsic(x, gt);
      have_coords = true;
      if (prev_s_coords)
        alpha0 = bb_quotient(*prev_s_coords, g_coords - *prev_g_coords, prev_step, d);
    } else if (cfg.step_policy == StepPolicy::Fixed) {
      alpha0 = cfg.fixed_step;
    }

    double f_cur = f;
    double step = alpha0;
    bool accepted = false;
    FactorPair cand;
    int trials = cfg.step_policy == StepPolicy::Fixed ? 1 : cfg.max_backtracks;
    for (int t = 0; t < trials; ++t, step *= cfg.shrink) {
      TangentPair eta{-step * gt.dh, -step * gt.dm};
      FactorPair y_pt;
      try {
        y_pt = retract(x, eta);
      } catch (const ManifoldError&) {
        continue;
      }
      double f_trial = obj.cost(y_pt, ctx);
      if (cfg.step_policy == StepPolicy::Fixed ||
          f_trial <= f_cur - cfg.armijo_c * step * gn2) {
        cand = std::move(y_pt);
        f = f_trial;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      rep.reason = Termination::Stalled;
      break;
    }

    rep.accepted_steps.push_back(step);
    if (have_coords) {
      prev_s_coords = (-step) * g_coords;  // eta_k = -step * grad in coordinates
      prev_g_coords = std::move(g_coords);
    }
    prev_step = step;

    x = balance(cand);
    obj.rebalance_context(ctx, x);
    relres = obj.relative_residual(ctx);
    rep.relres_history.push_back(relres);
    rep.cost_history.push_back(f);
    rep.iterations = k + 1;
    if (cfg.record_iterates) rep.iterates.push_back(x);

    if (relres <= cfg.rel_residual_tol) {
      rep.reason = Termination::Converged;
      break;
    }
  }

  rep.x = std::move(x);
  rep.ops = op.counters().snapshot() - before;
  return rep;
}

namespace {
bool same_vector(const ComplexVector& a, const ComplexVector& b) {
  return a.size() == b.size() &&
         std::memcmp(a.data(), b.data(), sizeof(Complex) * a.size()) == 0;
}
}  // namespace

double wirtinger_cost(const MeasurementOperator& op, const ComplexVector& y, const FactorPair& x,
                      double rho, double d, double mu, FlatEval& ctx) {
  validate_factor_pair(x);
  if (ctx.valid && same_vector(ctx.h, x.h) && same_vector(ctx.m, x.m)) return ctx.cost;
  ctx.h = x.h;
  ctx.m = x.m;
  ctx.u = op.apply_b(x.h);
  ctx.v = op.apply_c(x.m);
  kernels::hadamard_conj(ctx.u, ctx.v, ctx.r);
  ctx.r -= y;
  ctx.data = ctx.r.squaredNorm();
  double pen = 0.0;
  if (rho > 0.0) {
    double scale = static_cast<double>(op.L()) / (8.0 * d * mu * mu);
    pen = rho * (g0(x.h.squaredNorm() / (2.0 * d)) + g0(x.m.squaredNorm() / (2.0 * d)) +
                 kernels::penalty_sum(ctx.u, scale));
  }
  ctx.cost = ctx.data + pen;
  ctx.valid = true;
  return ctx.cost;
}

TangentPair wirtinger_gradient(const MeasurementOperator& op, const ComplexVector& y,
                               const FactorPair& x, double rho, double d, double mu,
                               FlatEval& ctx) {
  wirtinger_cost(op, y, x, rho, d, mu, ctx);
  TangentPair g;
  g.dh = op.apply_b_adjoint(2.0 * ctx.r.cwiseProduct(ctx.v));
  g.dm = op.apply_c_adjoint(2.0 * ctx.r.conjugate().cwiseProduct(ctx.u));
  if (rho > 0.0) {
    double scale = static_cast<double>(op.L()) / (8.0 * d * mu * mu);
    RealVector gw;
    kernels::penalty_weights(ctx.u, scale, gw);
    double coef = static_cast<double>(op.L()) * rho / (4.0 * d * mu * mu);
    g.dh += coef * op.apply_b_adjoint(gw.cast<Complex>().cwiseProduct(ctx.u), /*tally_bh=*/false);
    g.dh += (rho / d) * g0_prime(x.h.squaredNorm() / (2.0 * d)) * x.h;
    g.dm += (rho / d) * g0_prime(x.m.squaredNorm() / (2.0 * d)) * x.m;
  }
  // Wirtinger derivative is half the Euclidean gradient.
  g.dh *= 0.5;
  g.dm *= 0.5;
  return g;
}

SolverReport wirtinger_solve(const MeasurementOperator& op, const ComplexVector& y,
                             const FactorPair& x0, double d, double mu, double rho,
                             const SolverConfig& cfg, WirtingerVariant variant) {
  validate_config(cfg);
  validate_factor_pair(x0);
  require(d > 0.0 && mu > 0.0, "wirtinger_solve: d and mu must be positive");
  require(y.size() == op.L(), "wirtinger_solve: y must have length L");

  CounterSnapshot before = op.counters().snapshot();
  const double ynorm = y.norm();

  SolverReport rep;
  FactorPair x = x0;
  FlatEval ctx;
  double f = wirtinger_cost(op, y, x, rho, d, mu, ctx);
  double relres = ctx.r.norm() / ynorm;
  rep.relres_history.push_back(relres);
  rep.cost_history.push_back(f);
  if (cfg.record_iterates) rep.iterates.push_back(x);

  if (relres <= cfg.rel_residual_tol) {
    rep.x = std::move(x);
    rep.reason = Termination::Converged;
    rep.ops = op.counters().snapshot() - before;
    return rep;
  }

  const double default_init = cfg.backtracking_init > 0.0 ? cfg.backtracking_init : 1.0 / d;
  double prev_step = default_init;
  double grad0_norm = -1.0;
  ComplexVector prev_sh, prev_sm, prev_gh, prev_gm;
  bool have_prev = false;
  rep.reason = Termination::MaxIterations;

  for (int k = 0; k < cfg.max_iter; ++k) {
    TangentPair g = wirtinger_gradient(op, y, x, rho, d, mu, ctx);
    double gn2 = g.dh.squaredNorm() + g.dm.squaredNorm();
    rep.gradnorm2_history.push_back(gn2);
    double gn = std::sqrt(gn2);
    if (grad0_norm < 0.0) grad0_norm = gn;

    if (cfg.grad_ratio_tol > 0.0 && grad0_norm > 0.0 && gn <= cfg.grad_ratio_tol * grad0_norm) {
      rep.reason = Termination::GradientRatio;
      break;
    }
    if (gn2 <= 0.0) {
      rep.reason = relres <= cfg.rel_residual_tol ? Termination::Converged : Termination::Stalled;
      break;
    }

    double alpha0 = default_init;
    if (variant == WirtingerVariant::BBInitStep && have_prev)
      // fall back to the 1/d default: the flat problem is ill-conditioned
      // along the scaling direction and a stale tiny step can trap it
      alpha0 = euclidean_bb(prev_sh, prev_sm, g.dh - prev_gh, g.dm - prev_gm, default_init, d);

    double f_cur = f;
    double step = alpha0;
    bool accepted = false;
    FactorPair cand;
    for (int t = 0; t < cfg.max_backtracks; ++t, step *= cfg.shrink) {
      FactorPair y_pt{x.h - step * g.dh, x.m - step * g.dm};
      if (y_pt.h.norm() == 0.0 || y_pt.m.norm() == 0.0) continue;
      double f_trial = wirtinger_cost(op, y, y_pt, rho, d, mu, ctx);
      // directional derivative along -grad^w is -2||grad^w||^2
      if (f_trial <= f_cur - 2.0 * cfg.armijo_c * step * gn2) {
        cand = std::move(y_pt);
        f = f_trial;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      rep.reason = Termination::Stalled;
      break;
    }

    rep.accepted_steps.push_back(step);
    prev_sh = -step * g.dh;
    prev_sm = -step * g.dm;
    prev_gh = std::move(g.dh);
    prev_gm = std::move(g.dm);
    have_prev = true;
    prev_step = step;

    x = std::move(cand);
    relres = ctx.r.norm() / ynorm;
    rep.relres_history.push_back(relres);
    rep.cost_history.push_back(f);
    rep.iterations = k + 1;
    if (cfg.record_iterates) rep.iterates.push_back(x);

    if (relres <= cfg.rel_residual_tol) {
      rep.reason = Termination::Converged;
      break;
    }
  }

  rep.x = std::move(x);
  rep.ops = op.counters().snapshot() - before;
  return rep;
}

SolverReport ama_solve(const MeasurementOperator& op, const ComplexVector& y,
                       const FactorPair& x0, const SolverConfig& cfg) {
  validate_config(cfg);
  validate_factor_pair(x0);
  require(y.size() == op.L(), "ama_solve: y must have length L");

  CounterSnapshot before = op.counters().snapshot();
  const double ynorm = y.norm();

  SolverReport rep;
  FactorPair x = x0;
  ComplexVector u = op.apply_b(x.h);
  ComplexVector v = op.apply_c(x.m);
  ComplexVector r;
  kernels::hadamard_conj(u, v, r);
  r -= y;

  double relres = r.norm() / ynorm;
  rep.relres_history.push_back(relres);
  rep.cost_history.push_back(r.squaredNorm());
  if (cfg.record_iterates) rep.iterates.push_back(x);

  if (relres <= cfg.rel_residual_tol) {
    rep.x = std::move(x);
    rep.reason = Termination::Converged;
    rep.ops = op.counters().snapshot() - before;
    return rep;
  }

  rep.reason = Termination::MaxIterations;
  for (int k = 0; k < cfg.max_iter; ++k) {
    bool progressed = false;

    // m block: exact line search along -grad_m F(h, m)
    ComplexVector gm = op.apply_c_adjoint(2.0 * r.conjugate().cwiseProduct(u));
    double gm2 = gm.squaredNorm();
    if (gm2 > 0.0) {
      ComplexVector cg = op.apply_c(gm);
      ComplexVector q(op.L());
      kernels::hadamard_conj(u, cg, q);
      double qn2 = q.squaredNorm();
      if (qn2 > 0.0) {
        double t = gm2 / (2.0 * qn2);
        x.m -= t * gm;
        v -= t * cg;
        r -= t * q;
        progressed = true;
      }
    }
    rep.half_step_costs.push_back(r.squaredNorm());

    // h block with the refreshed residual
    ComplexVector gh = op.apply_b_adjoint(2.0 * r.cwiseProduct(v));
    double gh2 = gh.squaredNorm();
    if (gh2 > 0.0) {
      ComplexVector bg = op.apply_b(gh);
      ComplexVector qh(op.L());
      kernels::hadamard_conj(bg, v, qh);
      double qn2 = qh.squaredNorm();
      if (qn2 > 0.0) {
        double t = gh2 / (2.0 * qn2);
        x.h -= t * gh;
        u -= t * bg;
        r -= t * qh;
        progressed = true;
      }
    }
    rep.half_step_costs.push_back(r.squaredNorm());

    relres = r.norm() / ynorm;
    rep.relres_history.push_back(relres);
    rep.cost_history.push_back(r.squaredNorm());
    rep.iterations = k + 1;
    if (cfg.record_iterates) rep.iterates.push_back(x);

    if (!progressed) {
      rep.reason =
          relres <= cfg.rel_residual_tol ? Termination::Converged : Termination::Stalled;
      break;
    }
    if (relres <= cfg.rel_residual_tol) {
      rep.reason = Termination::Converged;
      break;
    }
  }

  rep.x = std::move(x);
  rep.ops = op.counters().snapshot() - before;
  return rep;
}

}  // namespace bdq
