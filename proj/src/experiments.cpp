#include "bdq/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "bdq/fft.hpp"
#include "bdq/rng.hpp"

namespace bdq {

const char* algo_name(Algo a) {
  switch (a) {
    case Algo::ROBB:
      return "ROBB";
    case Algo::NCBT:
      return "NCBT";
    case Algo::NCBB:
      return "NCBB";
    case Algo::AMA:
      return "AMA";
  }
  return "?";
}

std::optional<Algo> algo_from_name(const std::string& name) {
  if (name == "ROBB" || name == "robb") return Algo::ROBB;
  if (name == "NCBT" || name == "ncbt") return Algo::NCBT;
  if (name == "NCBB" || name == "ncbb") return Algo::NCBB;
  if (name == "AMA" || name == "ama") return Algo::AMA;
  return std::nullopt;
}

std::optional<KernelChoice> kernel_from_name(const std::string& name) {
  if (name == "motion") return KernelChoice::Motion;
  if (name == "gaussian") return KernelChoice::Gaussian;
  if (name == "sin") return KernelChoice::Sinusoid;
  if (name == "identity") return KernelChoice::Identity;
  return std::nullopt;
}

double default_mu(int L, int K, int N) {
  return 6.0 * std::sqrt(static_cast<double>(L) / (K + N)) / std::log(static_cast<double>(L));
}

TrialOutcome run_synthetic_trial(int K, int N, int L, Algo algo, std::uint64_t instance_seed,
                                 const SolverConfig& cfg, double tau) {
  TrialOutcome out;
  auto eng_h = make_engine(derive_seed(instance_seed, {1}));
  auto eng_m = make_engine(derive_seed(instance_seed, {2}));
  std::uint64_t seed_c = derive_seed(instance_seed, {3});
  std::uint64_t seed_e = derive_seed(instance_seed, {4});
  std::uint64_t seed_p = derive_seed(instance_seed, {5});

  MeasurementOperator op(L, make_partial_dft_b(L, K), DenseGaussianC{N, seed_c});
  FactorPair truth{complex_gaussian(K, eng_h), complex_gaussian(N, eng_m)};
  ComplexVector y = op.apply_forward(truth.h, truth.m);
  if (tau > 0.0) y += make_noise(NoiseModel{tau, seed_e}, L, y.norm());

  const double mu = default_mu(L, K, N);
  FactorPair x0;
  double d = 0.0;
  try {
    InitResult init = spectral_init(op, y, mu, 1e-10, 500, seed_p);
    x0 = std::move(init.x0);
    d = init.d;
    out.init_ops = init.ops;
  } catch (const ConvergenceError& e) {
    // keep the best power iterate; the solve proceeds from it
    out.init_converged = false;
    d = e.value;
    if (!(d > 0.0) || !std::isfinite(d)) {
      out.failed = true;
      return out;
    }
    double sd = std::sqrt(d);
    ComplexVector h0 = coherence_project(sd * e.left, 2.0 * sd * mu, op);
    x0 = balance(FactorPair{std::move(h0), sd * e.right});
  }

  SolverReport rep;
  switch (algo) {
    case Algo::ROBB: {
      Objective obj(op, y, experiment_penalty(d, L, K, N));
      rep = rsd_solve(obj, x0, d, cfg);
      break;
    }
    case Algo::NCBT:
      rep = wirtinger_solve(op, y, x0, d, mu, d * d / 100.0, cfg,
                            WirtingerVariant::FixedInitStep);
      break;
    case Algo::NCBB:
      rep = wirtinger_solve(op, y, x0, d, mu, d * d / 100.0, cfg, WirtingerVariant::BBInitStep);
      break;
    case Algo::AMA:
      rep = ama_solve(op, y, x0, cfg);
      break;
  }
  out.rmse = rmse(rep.x, truth);
  out.solver_ops = rep.ops;
  out.reason = rep.reason;
  out.iterations = rep.iterations;
  return out;
}

std::vector<BenchRow> run_bench(const BenchSpec& spec) {
  require(spec.trials >= 1, "bench: trials must be positive");
  require(spec.K >= 1 && spec.N >= 1 && spec.L >= spec.K, "bench: bad dimensions");
  std::vector<BenchRow> rows;
  for (std::size_t ai = 0; ai < spec.algos.size(); ++ai) {
    Algo algo = spec.algos[ai];
    std::vector<TrialOutcome> outs(spec.trials);
#pragma omp parallel for schedule(dynamic)
    for (int t = 0; t < spec.trials; ++t) {
      std::uint64_t s = derive_seed(spec.seed, {0xbe, static_cast<std::uint64_t>(t)});
      try {
        outs[t] = run_synthetic_trial(spec.K, spec.N, spec.L, algo, s, spec.config);
      } catch (...) {
        outs[t].failed = true;
      }
    }
    BenchRow row;
    row.algo = algo;
    int n = 0;
    for (const auto& o : outs) {
      if (o.failed) {
        ++row.stalls;
        continue;
      }
      row.nBh += o.solver_ops.bh;
      row.nCm += o.solver_ops.cm;
      row.nFFT += o.solver_ops.fft;
      row.init_nFFT += o.init_ops.fft;
      row.rmse += o.rmse;
      if (o.reason == Termination::Stalled) ++row.stalls;
      ++n;
    }
    if (n > 0) {
      row.nBh /= n;
      row.nCm /= n;
      row.nFFT /= n;
      row.init_nFFT /= n;
      row.rmse /= n;
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<PhaseRow> run_phase(const PhaseSpec& spec) {
  require(spec.trials >= 1, "phase: trials must be positive");
  for (std::size_t i = 1; i < spec.ratios.size(); ++i)
    require(spec.ratios[i] > spec.ratios[i - 1], "phase: ratio grid must be strictly increasing");
  std::vector<PhaseRow> rows;
  for (std::size_t ri = 0; ri < spec.ratios.size(); ++ri) {
    const double ratio = spec.ratios[ri];
    const int L = std::max(spec.K, static_cast<int>(std::lround(ratio * (spec.K + spec.N))));
    for (std::size_t ai = 0; ai < spec.algos.size(); ++ai) {
      Algo algo = spec.algos[ai];
      std::vector<int> success(spec.trials, 0);
#pragma omp parallel for schedule(dynamic)
      for (int t = 0; t < spec.trials; ++t) {
        std::uint64_t s = derive_seed(spec.seed,
                                      {0x9a, static_cast<std::uint64_t>(ri),
                                       static_cast<std::uint64_t>(t)});
        try {
          TrialOutcome o = run_synthetic_trial(spec.K, spec.N, L, algo, s, spec.config);
          success[t] = (!o.failed && std::isfinite(o.rmse) && o.rmse <= spec.success_rmse) ? 1 : 0;
        } catch (...) {
          success[t] = 0;
        }
      }
      PhaseRow row;
      row.ratio = ratio;
      row.algo = algo;
      row.success_rate =
          std::accumulate(success.begin(), success.end(), 0) / static_cast<double>(spec.trials);
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<NoiseRow> run_noise(const NoiseSpec& spec) {
  require(spec.trials >= 1, "noise: trials must be positive");
  std::vector<NoiseRow> rows;
  for (std::size_t li = 0; li < spec.Ls.size(); ++li) {
    const int L = spec.Ls[li];
    for (std::size_t si = 0; si < spec.snr_db.size(); ++si) {
      const double snr = spec.snr_db[si];
      const double tau = std::pow(10.0, -snr / 20.0);
      std::vector<double> rmses(spec.trials, 0.0);
#pragma omp parallel for schedule(dynamic)
      for (int t = 0; t < spec.trials; ++t) {
        std::uint64_t s = derive_seed(spec.seed,
                                      {0x17, static_cast<std::uint64_t>(li),
                                       static_cast<std::uint64_t>(si),
                                       static_cast<std::uint64_t>(t)});
        try {
          TrialOutcome o =
              run_synthetic_trial(spec.K, spec.N, L, Algo::ROBB, s, spec.config, tau);
          rmses[t] = o.failed ? 1.0 : o.rmse;
        } catch (...) {
          rmses[t] = 1.0;
        }
      }
      double mean = std::accumulate(rmses.begin(), rmses.end(), 0.0) / spec.trials;
      NoiseRow row;
      row.snr_db = snr;
      row.rmse_db = 20.0 * std::log10(std::max(mean, 1e-300));
      row.L = L;
      rows.push_back(row);
    }
  }
  return rows;
}

namespace {

RealMatrix pick_kernel(const DeblurSpec& spec) {
  switch (spec.kernel) {
    case KernelChoice::Motion:
      return make_motion_kernel(spec.kernel_len, spec.kernel_angle);
    case KernelChoice::Gaussian:
      return make_gaussian_kernel(spec.gaussian_cov);
    case KernelChoice::Sinusoid:
      return make_sin_kernel(spec.kernel_len, spec.sin_amplitude, spec.sin_periods);
    case KernelChoice::Identity:
      return RealMatrix::Ones(1, 1);
  }
  return RealMatrix::Ones(1, 1);
}

/// Fix the representative phase so the kernel's DC Fourier coefficient
/// (proportional to sum_i h_i) is real positive, then reconstruct the image
/// as Re(conj(C m)) = Re(W * conj(m)).
RealMatrix reconstruct_image(const FactorPair& x, const std::vector<Eigen::Index>& coeff_index,
                             int rows, int cols) {
  Complex dc = x.h.sum();
  Complex q = std::abs(dc) > 0.0 ? dc / std::abs(dc) : Complex(1.0, 0.0);
  ComplexVector m_aligned = x.m * std::conj(q);
  ComplexMatrix coeffs = ComplexMatrix::Zero(rows, cols);
  for (std::size_t i = 0; i < coeff_index.size(); ++i)
    coeffs(coeff_index[i]) = std::conj(m_aligned[static_cast<Eigen::Index>(i)]);
  ComplexMatrix img = haar_synthesis(coeffs);
  return img.real();
}

double deblur_relerr(const RealMatrix& sharp, const RealMatrix& blurred, const RealMatrix& recon) {
  double scale = blurred.norm() / std::max(recon.norm(), 1e-300);
  return (sharp - scale * recon).norm() / sharp.norm();
}

}  // namespace

DeblurResult run_deblur(const DeblurSpec& spec) {
  const int rows = static_cast<int>(spec.image.rows());
  const int cols = static_cast<int>(spec.image.cols());
  require(is_power_of_two(rows) && is_power_of_two(cols),
          "deblur: image dimensions must be powers of two");
  require(spec.N >= 1, "deblur: N must be positive");
  require(spec.dilate >= 0, "deblur: dilation must be nonnegative");
  const Eigen::Index L = static_cast<Eigen::Index>(rows) * cols;
  require(spec.N <= L, "deblur: N exceeds the number of pixels");

  DeblurResult res;
  res.kernel = pick_kernel(spec);
  res.blurred = circular_convolve(spec.image, res.kernel);

  BoolMatrix mask = kernel_support(res.kernel);
  if (spec.dilate > 0) mask = dilate_mask(mask, spec.dilate);
  res.support = mask_flat_indices(stamp_mask(mask, rows, cols));
  res.K = static_cast<int>(res.support.size());
  require(res.K >= 1, "deblur: empty kernel support");

  // C columns: Haar coefficients of the observed (blurred) image.
  RealMatrix co = haar_analysis(res.blurred);
  std::vector<Eigen::Index> order(L);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::nth_element(order.begin(), order.begin() + spec.N, order.end(),
                   [&](Eigen::Index a, Eigen::Index b) {
                     double va = std::abs(co(a)), vb = std::abs(co(b));
                     if (va != vb) return va > vb;
                     return a < b;
                   });
  res.coeff_index.assign(order.begin(), order.begin() + spec.N);
  std::sort(res.coeff_index.begin(), res.coeff_index.end());

  MeasurementOperator op(SupportDftB{rows, cols, res.support},
                         HaarSubspaceC{rows, cols, res.coeff_index});

  // y = F2(blurred)/sqrt(L) with the unitary 2D DFT.
  Fft2D fft(rows, cols);
  ComplexVector yraw;
  fft.forward(res.blurred.reshaped().cast<Complex>().eval(), yraw);
  ComplexVector y = yraw / static_cast<double>(L);

  const double mu = default_mu(static_cast<int>(L), res.K, spec.N);
  InitResult init = spectral_init(op, y, mu, 1e-10, 500, derive_seed(spec.seed, {0xde}));
  res.init_ops = init.ops;

  // For the deterministic wavelet subspace, sigma_1(A^*(y)) is far below the
  // product scale d* (the Gaussian-model concentration does not apply), so
  // rescale the spectral direction by its least-squares fit against y.
  FactorPair x0 = init.x0;
  double d_run = init.d;
  {
    ComplexVector ax = op.apply_forward(x0.h, x0.m);
    double denom = ax.squaredNorm();
    double c = denom > 0.0 ? ax.dot(y).real() / denom : 0.0;
    if (c > 0.0) {
      double s = std::sqrt(c);
      x0.h *= s;
      x0.m *= s;
      d_run *= c;
    }
  }
  res.d = d_run;

  SolverConfig cfg = spec.config;
  cfg.record_iterates = true;
  Objective obj(op, y, experiment_penalty(d_run, static_cast<int>(L), res.K, spec.N));
  SolverReport rep = rsd_solve(obj, x0, d_run, cfg);
  res.solver_ops = rep.ops;

  for (int cp : spec.checkpoints) {
    if (cp < 0 || cp >= static_cast<int>(rep.iterates.size())) continue;
    DeblurCheckpoint c;
    c.iters = cp;
    c.relres = rep.relres_history[cp];
    RealMatrix img = reconstruct_image(rep.iterates[cp], res.coeff_index, rows, cols);
    c.relerr = deblur_relerr(spec.image, res.blurred, img);
    res.checkpoints.push_back(c);
  }

  res.solution = rep.x;
  res.recon = reconstruct_image(rep.x, res.coeff_index, rows, cols);
  res.relres = rep.relres_history.back();
  res.relerr = deblur_relerr(spec.image, res.blurred, res.recon);
  return res;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
  std::string out = "algorithm,nBh,nCm,nFFT,RMSE\n";
  for (const auto& r : rows) {
    out += algo_name(r.algo);
    out += ',';
    out += format_double(r.nBh);
    out += ',';
    out += format_double(r.nCm);
    out += ',';
    out += format_double(r.nFFT);
    out += ',';
    out += format_double(r.rmse);
    out += '\n';
  }
  return out;
}

std::string phase_csv(const std::vector<PhaseRow>& rows) {
  std::string out = "ratio,algorithm,success_rate\n";
  for (const auto& r : rows) {
    out += format_double(r.ratio);
    out += ',';
    out += algo_name(r.algo);
    out += ',';
    out += format_double(r.success_rate);
    out += '\n';
  }
  return out;
}

std::string noise_csv(const std::vector<NoiseRow>& rows) {
  std::string out = "snr_db,rmse_db,L\n";
  for (const auto& r : rows) {
    out += format_double(r.snr_db);
    out += ',';
    out += format_double(r.rmse_db);
    out += ',';
    out += std::to_string(r.L);
    out += '\n';
  }
  return out;
}

std::string deblur_csv(const DeblurResult& res) {
  std::string out = "iters,relres,relerr,nBh,nCm,nFFT\n";
  for (const auto& c : res.checkpoints) {
    out += std::to_string(c.iters);
    out += ',';
    out += format_double(c.relres);
    out += ',';
    out += format_double(c.relerr);
    out += ",,,\n";
  }
  out += "final,";
  out += format_double(res.relres);
  out += ',';
  out += format_double(res.relerr);
  out += ',';
  out += std::to_string(res.solver_ops.bh);
  out += ',';
  out += std::to_string(res.solver_ops.cm);
  out += ',';
  out += std::to_string(res.solver_ops.fft);
  out += '\n';
  return out;
}

}  // namespace bdq
