#pragma once

#include "bdq/linops.hpp"
#include "bdq/manifold.hpp"
#include "bdq/types.hpp"

namespace bdq {

/// Parameters of the coherence penalty G = rho * sum_i G0(L |b_i^* h|^2
/// ||m||^2 / (8 d^2 mu^2)).
struct PenaltyParams {
  double rho = 0.0;  // >= 0; 0 disables the penalty
  double d = 1.0;    // > 0, spectral-init scale estimate
  double mu = 1.0;   // > 0, coherence bound
};

void validate_penalty(const PenaltyParams& p);

/// Experiment defaults: rho = d^2/100, mu = 6 sqrt(L/(K+N)) / log L.
PenaltyParams experiment_penalty(double d, int L, int K, int N);

/// Theory-side choice rho >= d^2 + 2.5 ||e||^2 (available behind this helper;
/// the experiments use experiment_penalty).
double theory_rho(double d, double noise_norm2);

/// G0(t) = max(t-1, 0)^2 and its derivative; C^1 at the kink.
double g0(double t);
double g0_prime(double t);

/// The penalized cost f~(pi(h,m)) = ||y - diag(B h m^* C^*)||^2 + G and its
/// derivatives. Immutable after construction; all evaluation state lives in
/// the caller-owned EvalContext, so one Objective can serve concurrent
/// solvers each holding its own context.
class Objective {
 public:
  Objective(const MeasurementOperator& op, ComplexVector y, PenaltyParams p);

  struct EvalContext {
    bool valid = false;
    ComplexVector h, m;     // point the cache was computed at
    ComplexVector u, v, r;  // B h, C m, A(h m^*) - y
    double data = 0.0, penalty = 0.0, cost = 0.0;
    void invalidate() { valid = false; }
  };

  double cost(const FactorPair& x, EvalContext& ctx) const;

  /// Standalone penalty evaluation (applies B once).
  double penalty_value(const FactorPair& x) const;

  /// Euclidean gradient of f~. Reuses the context's residual when the point
  /// is unchanged (the gradient-after-cost fast path); otherwise evaluates
  /// the cost first.
  TangentPair euclidean_gradient(const FactorPair& x, EvalContext& ctx) const;

  /// Scaled gradient (grad_h/(m^*m), grad_m/(h^*h)); requires a balanced
  /// representative (throws ManifoldError otherwise). The result is
  /// horizontal by construction.
  HorizontalVector riemannian_gradient(const FactorPair& x, EvalContext& ctx) const;

  /// Second derivative d^2/dt^2 f(R(t eta))|_0 of the data-fit term only:
  /// 2||A(eta_h m^* + h eta_m^*)||^2 + 4 Re<A(h m^*) - y, A(eta_h eta_m^*)>.
  double hessian_quadratic_form(const FactorPair& x, const TangentPair& eta,
                                EvalContext& ctx) const;

  double relative_residual(const EvalContext& ctx) const;

  /// Swap the context to a rescaled representative (balancing): updates the
  /// cached point and rescales u, v; the residual and cost are unchanged.
  void rebalance_context(EvalContext& ctx, const FactorPair& balanced) const;

  const MeasurementOperator& op() const { return op_; }
  const ComplexVector& y() const { return y_; }
  const PenaltyParams& penalty_params() const { return p_; }
  double y_norm() const { return ynorm_; }

 private:
  const MeasurementOperator& op_;
  ComplexVector y_;
  PenaltyParams p_;
  double ynorm_;

  bool context_matches(const EvalContext& ctx, const FactorPair& x) const;
  double penalty_arg_scale(double m_norm2) const;  // L ||m||^2 / (8 d^2 mu^2)
};

}  // namespace bdq
