#pragma once

#include <string>
#include <vector>

#include "bdq/experiments.hpp"
#include "bdq/rng.hpp"

namespace bdq {

struct CheckResult {
  std::string name;
  bool pass = false;
  double value = 0.0;      // measured quantity
  double threshold = 0.0;  // bound it was compared against
  std::string detail;
};

/// Runs every module's invariants as a batch. Deterministic in the seed.
std::vector<CheckResult> run_invariant_suite(std::uint64_t seed = 20240901);

bool all_passed(const std::vector<CheckResult>& results);
std::string check_report_json(const std::vector<CheckResult>& results);

/// Max adjoint-pairing violation |Re<F(h,m), z> - Re<h m^*, G(z)>| / scale
/// over random draws, for any forward map F(h,m) -> C^L and adjoint map
/// G(z) -> C^{KxN}. The invariant suite instantiates it with a real
/// operator; tests can inject a broken adjoint to confirm the check trips.
template <class FwdFn, class AdjFn>
double adjoint_pairing_gap(int L, int K, int N, int trials, std::uint64_t seed, FwdFn&& fwd,
                           AdjFn&& adj) {
  auto eng = make_engine(seed);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    ComplexVector h = complex_gaussian(K, eng);
    ComplexVector m = complex_gaussian(N, eng);
    ComplexVector z = complex_gaussian(L, eng);
    ComplexVector a = fwd(h, m);
    ComplexMatrix g = adj(z);
    double lhs = a.dot(z).real();            // Re<A(h m^*), z>
    double rhs = (h.adjoint() * g * m)(0).real();  // Re<h m^*, A^*(z)>
    double scale = a.norm() * z.norm() + g.norm() * h.norm() * m.norm() + 1e-300;
    worst = std::max(worst, std::abs(lhs - rhs) / scale);
  }
  return worst;
}

}  // namespace bdq
