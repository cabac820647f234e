#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

#include "bdq/checks.hpp"
#include "bdq/experiments.hpp"

using json = nlohmann::ordered_json;

namespace {

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << content;
}

std::string sidecar_path(const std::string& out) { return out + ".json"; }

std::vector<bdq::Algo> parse_algos(const std::vector<std::string>& names) {
  std::vector<bdq::Algo> algos;
  for (const auto& n : names) {
    auto a = bdq::algo_from_name(n);
    if (!a) throw bdq::DimensionError("unknown algorithm: " + n);
    algos.push_back(*a);
  }
  return algos;
}

json config_json(const bdq::SolverConfig& c) {
  return json{{"max_iter", c.max_iter},
              {"rel_residual_tol", c.rel_residual_tol},
              {"grad_ratio_tol", c.grad_ratio_tol},
              {"armijo_c", c.armijo_c},
              {"shrink", c.shrink},
              {"max_backtracks", c.max_backtracks}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Blind deconvolution on the rank-one quotient manifold: experiment harness"};
  app.require_subcommand(1);

  std::uint64_t seed = 1;
  app.add_option("--seed", seed, "root seed for all substreams")->capture_default_str();

  bdq::BenchSpec bench_spec;
  std::vector<std::string> bench_algos;
  std::string bench_out;
  auto* bench = app.add_subcommand("bench", "operation-count benchmark of the four solvers");
  bench->add_option("--K", bench_spec.K, "left factor dimension")->capture_default_str();
  bench->add_option("--N", bench_spec.N, "right factor dimension")->capture_default_str();
  bench->add_option("--L", bench_spec.L, "number of measurements")->capture_default_str();
  bench->add_option("--trials", bench_spec.trials, "random instances per algorithm")
      ->capture_default_str();
  bench->add_option("--algo", bench_algos, "subset of {ROBB,NCBT,NCBB,AMA}");
  bench->add_option("--out", bench_out, "output CSV path (JSON sidecar alongside)");

  bdq::PhaseSpec phase_spec;
  std::vector<std::string> phase_algos;
  std::string phase_out;
  auto* phase = app.add_subcommand("phase", "empirical phase-transition curves");
  phase->add_option("--K", phase_spec.K, "left factor dimension")->capture_default_str();
  phase->add_option("--N", phase_spec.N, "right factor dimension")->capture_default_str();
  phase->add_option("--ratio-grid", phase_spec.ratios, "grid of L/(K+N) values");
  phase->add_option("--trials", phase_spec.trials, "trials per grid point")
      ->capture_default_str();
  phase->add_option("--algo", phase_algos, "subset of {ROBB,NCBT,NCBB,AMA}");
  phase->add_option("--out", phase_out, "output CSV path");

  bdq::NoiseSpec noise_spec;
  std::string noise_out;
  auto* noise = app.add_subcommand("noise", "RMSE versus SNR sweep (ROBB)");
  noise->add_option("--K", noise_spec.K, "left factor dimension")->capture_default_str();
  noise->add_option("--N", noise_spec.N, "right factor dimension")->capture_default_str();
  noise->add_option("--L", noise_spec.Ls, "measurement counts (repeatable)");
  noise->add_option("--snr-grid", noise_spec.snr_db, "SNR grid in dB");
  noise->add_option("--trials", noise_spec.trials, "trials per grid point")
      ->capture_default_str();
  noise->add_option("--out", noise_out, "output CSV path");

  auto* deblur = app.add_subcommand("deblur", "image deblurring experiment");
  std::string image_path, kernel_name = "motion", recon_path, deblur_out;
  double kernel_len = 12.0;
  int dilate = 0, iters = 80, subspace = 1250;
  deblur->add_option("--image", image_path,
                     "input sharp image (binary PGM, power-of-two dims); "
                     "omitted: built-in synthetic 256x256 image");
  deblur->add_option("--kernel", kernel_name, "motion | gaussian | sin | identity")
      ->capture_default_str();
  deblur->add_option("--kernel-len", kernel_len, "motion/sin kernel length in pixels")
      ->capture_default_str();
  deblur->add_option("--N", subspace, "Haar subspace size")->capture_default_str();
  deblur->add_option("--dilate", dilate, "enlarge the kernel support by this many pixels")
      ->capture_default_str();
  deblur->add_option("--iters", iters, "descent iterations")->capture_default_str();
  deblur->add_option("--out", deblur_out, "output CSV path");
  deblur->add_option("--recon", recon_path, "write the reconstructed image (PGM) here");

  auto* check = app.add_subcommand("check", "run the invariant suite");
  std::string check_out;
  check->add_option("--out", check_out, "write the JSON report here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*bench) {
      bench_spec.seed = seed;
      if (!bench_algos.empty()) bench_spec.algos = parse_algos(bench_algos);
      auto rows = bdq::run_bench(bench_spec);
      std::string csv = bdq::bench_csv(rows);
      std::cout << csv;
      if (!bench_out.empty()) {
        write_file(bench_out, csv);
        json side{{"experiment", "bench"},
                  {"K", bench_spec.K},
                  {"N", bench_spec.N},
                  {"L", bench_spec.L},
                  {"trials", bench_spec.trials},
                  {"seed", bench_spec.seed},
                  {"config", config_json(bench_spec.config)},
                  {"note", "nBh/nCm/nFFT cover the descent phase; initialization "
                           "FFTs are reported separately"}};
        json inits = json::array();
        for (const auto& r : rows)
          inits.push_back({{"algorithm", bdq::algo_name(r.algo)},
                           {"init_nFFT", r.init_nFFT},
                           {"stalled_trials", r.stalls}});
        side["init_costs"] = inits;
        write_file(sidecar_path(bench_out), side.dump(2) + "\n");
      }
    } else if (*phase) {
      phase_spec.seed = seed;
      if (!phase_algos.empty()) phase_spec.algos = parse_algos(phase_algos);
      auto rows = bdq::run_phase(phase_spec);
      std::string csv = bdq::phase_csv(rows);
      std::cout << csv;
      if (!phase_out.empty()) {
        write_file(phase_out, csv);
        json side{{"experiment", "phase"},
                  {"K", phase_spec.K},
                  {"N", phase_spec.N},
                  {"ratios", phase_spec.ratios},
                  {"trials", phase_spec.trials},
                  {"seed", phase_spec.seed},
                  {"success_rmse", phase_spec.success_rmse},
                  {"config", config_json(phase_spec.config)}};
        write_file(sidecar_path(phase_out), side.dump(2) + "\n");
      }
    } else if (*noise) {
      noise_spec.seed = seed;
      auto rows = bdq::run_noise(noise_spec);
      std::string csv = bdq::noise_csv(rows);
      std::cout << csv;
      if (!noise_out.empty()) {
        write_file(noise_out, csv);
        json side{{"experiment", "noise"},
                  {"K", noise_spec.K},
                  {"N", noise_spec.N},
                  {"L", noise_spec.Ls},
                  {"snr_db", noise_spec.snr_db},
                  {"trials", noise_spec.trials},
                  {"seed", noise_spec.seed},
                  {"config", config_json(noise_spec.config)}};
        write_file(sidecar_path(noise_out), side.dump(2) + "\n");
      }
    } else if (*deblur) {
      bdq::DeblurSpec spec;
      spec.image = image_path.empty() ? bdq::synthetic_leaf_image(256, 256)
                                      : bdq::read_pgm(image_path);
      auto kc = bdq::kernel_from_name(kernel_name);
      if (!kc) {
        std::cerr << "unknown kernel kind: " << kernel_name << "\n";
        return 2;
      }
      spec.kernel = *kc;
      spec.kernel_len = kernel_len;
      spec.N = subspace;
      spec.dilate = dilate;
      spec.config.max_iter = iters;
      spec.checkpoints.clear();
      for (int c = 20; c <= iters; c += 20) spec.checkpoints.push_back(c);
      spec.seed = seed;
      auto res = bdq::run_deblur(spec);
      std::string csv = bdq::deblur_csv(res);
      std::cout << csv;
      std::cout << "support size K=" << res.K << ", relres=" << bdq::format_double(res.relres)
                << ", relerr=" << bdq::format_double(res.relerr) << "\n";
      if (!recon_path.empty()) bdq::write_pgm(recon_path, res.recon);
      if (!deblur_out.empty()) {
        write_file(deblur_out, csv);
        json side{{"experiment", "deblur"},
                  {"image", image_path.empty() ? "synthetic-256" : image_path},
                  {"rows", spec.image.rows()},
                  {"cols", spec.image.cols()},
                  {"kernel", kernel_name},
                  {"kernel_len", kernel_len},
                  {"N", spec.N},
                  {"dilate", dilate},
                  {"iters", iters},
                  {"seed", seed},
                  {"K", res.K},
                  {"d", res.d},
                  {"boundary", "periodic (wrap-around) convolution"}};
        write_file(sidecar_path(deblur_out), side.dump(2) + "\n");
      }
    } else if (*check) {
      auto results = bdq::run_invariant_suite(seed);
      for (const auto& r : results) {
        std::printf("%-34s %s  value=%.3g threshold=%.3g %s\n", r.name.c_str(),
                    r.pass ? "PASS" : "FAIL", r.value, r.threshold, r.detail.c_str());
      }
      std::string report = bdq::check_report_json(results);
      if (!check_out.empty()) write_file(check_out, report);
      if (!bdq::all_passed(results)) {
        std::cout << "invariant suite: FAIL\n";
        return 1;
      }
      std::cout << "invariant suite: " << results.size() << " checks passed\n";
    }
  } catch (const bdq::DimensionError& e) {
    std::cerr << "invalid arguments: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
