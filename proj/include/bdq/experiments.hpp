#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bdq/deblur.hpp"
#include "bdq/haar.hpp"
#include "bdq/pgm.hpp"
#include "bdq/solvers.hpp"

namespace bdq {

enum class Algo { ROBB, NCBT, NCBB, AMA };

const char* algo_name(Algo a);
std::optional<Algo> algo_from_name(const std::string& name);

/// mu = 6 sqrt(L/(K+N)) / log L, the experiment default.
double default_mu(int L, int K, int N);

struct TrialOutcome {
  double rmse = std::numeric_limits<double>::quiet_NaN();
  CounterSnapshot init_ops, solver_ops;
  Termination reason = Termination::MaxIterations;
  int iterations = 0;
  bool init_converged = true;
  bool failed = false;  // trial aborted (exception); counts as unsuccessful
};

/// One synthetic recovery trial: Gaussian ground truth, Gaussian C, partial
/// DFT B, optional noise at scale tau, spectral initialization, one solver.
TrialOutcome run_synthetic_trial(int K, int N, int L, Algo algo, std::uint64_t instance_seed,
                                 const SolverConfig& cfg, double tau = 0.0);

struct BenchSpec {
  int K = 100, N = 100, L = 600;
  int trials = 20;
  std::uint64_t seed = 1;
  std::vector<Algo> algos = {Algo::ROBB, Algo::NCBT, Algo::NCBB, Algo::AMA};
  SolverConfig config;
};

struct BenchRow {
  Algo algo;
  double nBh = 0, nCm = 0, nFFT = 0, rmse = 0;
  double init_nFFT = 0;
  int stalls = 0;
};

std::vector<BenchRow> run_bench(const BenchSpec& spec);

struct PhaseSpec {
  int K = 50, N = 50;
  std::vector<double> ratios = {1.0, 1.5, 2.0, 2.5};
  int trials = 100;
  std::uint64_t seed = 1;
  std::vector<Algo> algos = {Algo::ROBB, Algo::NCBT, Algo::NCBB, Algo::AMA};
  double success_rmse = 1e-2;
  SolverConfig config;
};

struct PhaseRow {
  double ratio = 0;
  Algo algo = Algo::ROBB;
  double success_rate = 0;
};

std::vector<PhaseRow> run_phase(const PhaseSpec& spec);

struct NoiseSpec {
  int K = 100, N = 100;
  std::vector<int> Ls = {500, 1000};
  std::vector<double> snr_db = {10, 20, 30, 40, 50, 60};
  int trials = 10;
  std::uint64_t seed = 1;
  SolverConfig config;  // run_noise enables the gradient-ratio rule (1e-12)

  NoiseSpec() { config.grad_ratio_tol = 1e-12; }
};

struct NoiseRow {
  double snr_db = 0;
  double rmse_db = 0;
  int L = 0;
};

std::vector<NoiseRow> run_noise(const NoiseSpec& spec);

enum class KernelChoice { Motion, Gaussian, Sinusoid, Identity };

std::optional<KernelChoice> kernel_from_name(const std::string& name);

struct DeblurSpec {
  RealMatrix image;  // sharp input, power-of-two dims, values in [0,1]
  KernelChoice kernel = KernelChoice::Motion;
  double kernel_len = 12.0;
  double kernel_angle = 45.0;
  double sin_amplitude = 3.0;
  double sin_periods = 1.5;
  Eigen::Matrix2d gaussian_cov = (Eigen::Matrix2d() << 1.0, 0.8, 0.8, 1.0).finished();
  int N = 1250;
  int dilate = 0;  // enlarge the support mask by this many pixels
  std::vector<int> checkpoints = {20, 40, 60, 80};
  std::uint64_t seed = 1;
  SolverConfig config;

  DeblurSpec() { config.max_iter = 80; }
};

struct DeblurCheckpoint {
  int iters = 0;
  double relres = 0;
  double relerr = 0;
};

struct DeblurResult {
  RealMatrix kernel;   // true kernel used to blur
  RealMatrix blurred;  // observed image
  RealMatrix recon;    // reconstructed image (real part, phase-aligned)
  FactorPair solution;
  double relres = 0, relerr = 0;
  std::vector<DeblurCheckpoint> checkpoints;
  CounterSnapshot init_ops, solver_ops;
  int K = 0;  // support size after dilation
  double d = 0;
  std::vector<Eigen::Index> support;      // stamped flat indices used for B
  std::vector<Eigen::Index> coeff_index;  // Haar coefficient indices used for C
};

DeblurResult run_deblur(const DeblurSpec& spec);

// Byte-deterministic CSV serializations with fixed headers.
std::string format_double(double v);
std::string bench_csv(const std::vector<BenchRow>& rows);
std::string phase_csv(const std::vector<PhaseRow>& rows);
std::string noise_csv(const std::vector<NoiseRow>& rows);
std::string deblur_csv(const DeblurResult& res);

}  // namespace bdq
