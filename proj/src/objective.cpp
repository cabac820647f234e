#include "bdq/objective.hpp"

#include <cmath>
#include <cstring>

#include "bdq/kernels.hpp"

namespace bdq {

namespace {
bool vectors_identical(const ComplexVector& a, const ComplexVector& b) {
  return a.size() == b.size() &&
         std::memcmp(a.data(), b.data(), sizeof(Complex) * a.size()) == 0;
}
}  // namespace

void validate_penalty(const PenaltyParams& p) {
  require(p.rho >= 0.0, "penalty: rho must be nonnegative");
  require(p.d > 0.0, "penalty: d must be positive");
  require(p.mu > 0.0, "penalty: mu must be positive");
}

PenaltyParams experiment_penalty(double d, int L, int K, int N) {
  require(L >= 2, "experiment_penalty: L must be at least 2");
  PenaltyParams p;
  p.d = d;
  p.rho = d * d / 100.0;
  p.mu = 6.0 * std::sqrt(static_cast<double>(L) / (K + N)) / std::log(static_cast<double>(L));
  return p;
}

double theory_rho(double d, double noise_norm2) { return d * d + 2.5 * noise_norm2; }

double g0(double t) {
  double s = t - 1.0;
  return s > 0.0 ? s * s : 0.0;
}

double g0_prime(double t) {
  double s = t - 1.0;
  return s > 0.0 ? 2.0 * s : 0.0;
}

Objective::Objective(const MeasurementOperator& op, ComplexVector y, PenaltyParams p)
    : op_(op), y_(std::move(y)), p_(p), ynorm_(y_.norm()) {
  require(y_.size() == op_.L(), "Objective: y must have length L");
  require_finite(y_, "Objective y");
  validate_penalty(p_);
}

bool Objective::context_matches(const EvalContext& ctx, const FactorPair& x) const {
  return ctx.valid && vectors_identical(ctx.h, x.h) && vectors_identical(ctx.m, x.m);
}

double Objective::penalty_arg_scale(double m_norm2) const {
  return static_cast<double>(op_.L()) * m_norm2 / (8.0 * p_.d * p_.d * p_.mu * p_.mu);
}

double Objective::cost(const FactorPair& x, EvalContext& ctx) const {
  validate_factor_pair(x);
  if (context_matches(ctx, x)) return ctx.cost;
  ctx.h = x.h;
  ctx.m = x.m;
  ctx.u = op_.apply_b(x.h);
  ctx.v = op_.apply_c(x.m);
  kernels::hadamard_conj(ctx.u, ctx.v, ctx.r);
  ctx.r -= y_;
  ctx.data = ctx.r.squaredNorm();
  ctx.penalty = 0.0;
  if (p_.rho > 0.0)
    ctx.penalty = p_.rho * kernels::penalty_sum(ctx.u, penalty_arg_scale(x.m.squaredNorm()));
  ctx.cost = ctx.data + ctx.penalty;
  ctx.valid = true;
  return ctx.cost;
}

double Objective::penalty_value(const FactorPair& x) const {
  validate_factor_pair(x);
  if (p_.rho == 0.0) return 0.0;
  ComplexVector u = op_.apply_b(x.h);
  return p_.rho * kernels::penalty_sum(u, penalty_arg_scale(x.m.squaredNorm()));
}

TangentPair Objective::euclidean_gradient(const FactorPair& x, EvalContext& ctx) const {
  cost(x, ctx);
  TangentPair g;
  g.dh = op_.apply_b_adjoint(2.0 * ctx.r.cwiseProduct(ctx.v));
  g.dm = op_.apply_c_adjoint(2.0 * ctx.r.conjugate().cwiseProduct(ctx.u));
  if (p_.rho > 0.0) {
    const double m2 = x.m.squaredNorm();
    RealVector gw;
    double weighted_u2 = kernels::penalty_weights(ctx.u, penalty_arg_scale(m2), gw);
    const double coef =
        static_cast<double>(op_.L()) * p_.rho / (4.0 * p_.d * p_.d * p_.mu * p_.mu);
    g.dh += (coef * m2) *
            op_.apply_b_adjoint(gw.cast<Complex>().cwiseProduct(ctx.u), /*tally_bh=*/false);
    g.dm += (coef * weighted_u2) * x.m;
  }
  return g;
}

HorizontalVector Objective::riemannian_gradient(const FactorPair& x, EvalContext& ctx) const {
  if (!is_balanced(x, 1e-12))
    throw ManifoldError("riemannian_gradient: representative must be balanced");
  TangentPair g = euclidean_gradient(x, ctx);
  // The scaled gradient is horizontal by the identity h^* grad_h = grad_m^* m
  // (quotient invariance of the cost), so no projection is applied.
  return HorizontalVector{x, g.dh / x.m.squaredNorm(), g.dm / x.h.squaredNorm()};
}

double Objective::hessian_quadratic_form(const FactorPair& x, const TangentPair& eta,
                                         EvalContext& ctx) const {
  require(eta.dh.size() == x.h.size() && eta.dm.size() == x.m.size(),
          "hessian_quadratic_form: dimension mismatch");
  cost(x, ctx);
  ComplexVector bu = op_.apply_b(eta.dh);
  ComplexVector cv = op_.apply_c(eta.dm);
  ComplexVector s(op_.L());
  ComplexVector q(op_.L());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    s[i] = bu[i] * std::conj(ctx.v[i]) + ctx.u[i] * std::conj(cv[i]);
    q[i] = bu[i] * std::conj(cv[i]);
  }
  return 2.0 * s.squaredNorm() + 4.0 * ctx.r.dot(q).real();
}

double Objective::relative_residual(const EvalContext& ctx) const {
  require(ctx.valid, "relative_residual: context not evaluated");
  return ctx.r.norm() / ynorm_;
}

void Objective::rebalance_context(EvalContext& ctx, const FactorPair& balanced) const {
  if (!ctx.valid) return;
  double nh = ctx.h.norm();
  double nm = ctx.m.norm();
  double s = std::sqrt(nh * nm);
  ctx.u *= s / nh;
  ctx.v *= s / nm;
  ctx.h = balanced.h;
  ctx.m = balanced.m;
  // r, data, penalty are invariants of the equivalence class; keep them.
}

}  // namespace bdq
