#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "bdq/objective.hpp"

namespace bdq {

enum class StepPolicy { Fixed, Backtracking, BBBacktracking };
enum class Termination { Converged, GradientRatio, MaxIterations, Stalled };

const char* termination_name(Termination t);

struct SolverConfig {
  int max_iter = 2000;
  double rel_residual_tol = 1e-8;
  StepPolicy step_policy = StepPolicy::BBBacktracking;
  double fixed_step = 0.1;         // Fixed policy only
  double backtracking_init = 0.0;  // 0 means 1/d
  double armijo_c = 1e-4;
  double shrink = 0.5;
  int max_backtracks = 50;
  double grad_ratio_tol = 0.0;  // > 0 enables the gradient-norm-ratio stop
  bool record_iterates = false;
};

void validate_config(const SolverConfig& cfg);

struct SolverReport {
  FactorPair x;
  int iterations = 0;
  Termination reason = Termination::MaxIterations;
  std::vector<double> relres_history;     // entry k: after k accepted steps
  std::vector<double> cost_history;       // same indexing
  std::vector<double> accepted_steps;     // per accepted iteration
  std::vector<double> gradnorm2_history;  // squared gradient norm per iteration
  std::vector<double> half_step_costs;    // AMA only: F after every half-step
  std::vector<FactorPair> iterates;       // when record_iterates
  CounterSnapshot ops;                    // descent phase only (init tallied separately)
};

/// ||h m^* - h# m#^*||_F / (||h#|| ||m#||), evaluated in O(K+N).
double rmse(const FactorPair& x, const FactorPair& truth);

/// Clip-and-pull-back approximation of argmin ||z' - z|| s.t.
/// sqrt(L)||B z'||_inf <= bound: iterate z <- z - B^*(Bz - clip(Bz)) to a
/// fixed point (<= 50 sweeps, tol 1e-10), then rescale if a sliver of
/// infeasibility remains. Exact when B is square unitary.
ComplexVector coherence_project(const ComplexVector& z, double bound,
                                const MeasurementOperator& op);

struct InitResult {
  FactorPair x0;  // balanced representative
  double d = 0.0;
  CounterSnapshot ops;
  int power_iterations = 0;
};

/// Spectral initialization: leading singular triple of A^*(y), scaling by
/// sqrt(d), and the coherence projection of the left factor.
InitResult spectral_init(const MeasurementOperator& op, const ComplexVector& y, double mu,
                         double tol = 1e-10, int max_iter = 500, std::uint64_t seed = 0x5eed);

/// Riemannian steepest descent on the quotient manifold: balance every
/// iteration, step (h,m) <- (h,m) - (alpha/d_k)(grad_h f~, grad_m f~) with
/// Armijo backtracking (BB or 1/d initial step).
SolverReport rsd_solve(const Objective& obj, const FactorPair& x0, double d,
                       const SolverConfig& cfg);

enum class WirtingerVariant { FixedInitStep, BBInitStep };  // NCBT / NCBB

/// Wirtinger gradient descent on C^K x C^N with the three-term penalty; no
/// balancing, no quotient structure.
SolverReport wirtinger_solve(const MeasurementOperator& op, const ComplexVector& y,
                             const FactorPair& x0, double d, double mu, double rho,
                             const SolverConfig& cfg, WirtingerVariant variant);

/// Alternating minimization on the penalty-free cost F with closed-form
/// exact line search per block.
SolverReport ama_solve(const MeasurementOperator& op, const ComplexVector& y,
                       const FactorPair& x0, const SolverConfig& cfg);

/// BB initial step g(s,y)/g(y,y) with s = T eta_k and y = grad_{k+1} -
/// T grad_k, computed in intrinsic coordinates (transport is the coordinate
/// identity). Falls back to `fallback` on a degenerate or out-of-range
/// quotient.
double bb_initial_step(const FactorPair& xk, const TangentPair& grad_k, const TangentPair& eta_k,
                       const FactorPair& xk1, const TangentPair& grad_k1, double fallback,
                       double d);

/// Evaluation cache for the Wirtinger baseline cost F~.
struct FlatEval {
  bool valid = false;
  ComplexVector h, m, u, v, r;
  double cost = 0.0, data = 0.0;
  void invalidate() { valid = false; }
};

double wirtinger_cost(const MeasurementOperator& op, const ComplexVector& y, const FactorPair& x,
                      double rho, double d, double mu, FlatEval& ctx);

/// Wirtinger derivative of F~ (exactly half the Euclidean gradient).
TangentPair wirtinger_gradient(const MeasurementOperator& op, const ComplexVector& y,
                               const FactorPair& x, double rho, double d, double mu,
                               FlatEval& ctx);

}  // namespace bdq
