#include <benchmark/benchmark.h>

#include "bdq/kernels.hpp"
#include "bdq/linops.hpp"
#include "bdq/rng.hpp"

using namespace bdq;

namespace {

struct GemvFixture {
  ComplexMatrix a;
  ComplexVector x, w, y;
  GemvFixture(int rows, int cols) {
    auto eng = make_engine(7);
    a = make_gaussian_c(rows, cols, 7);
    x = complex_gaussian(cols, eng);
    w = complex_gaussian(rows, eng);
  }
};

void BM_cgemv_serial(benchmark::State& state) {
  GemvFixture f(state.range(0), state.range(1));
  for (auto _ : state) {
    kernels::cgemv_serial(f.a, f.x, f.y);
    benchmark::DoNotOptimize(f.y.data());
  }
}

void BM_cgemv_parallel(benchmark::State& state) {
  GemvFixture f(state.range(0), state.range(1));
  for (auto _ : state) {
    kernels::cgemv_parallel(f.a, f.x, f.y);
    benchmark::DoNotOptimize(f.y.data());
  }
}

void BM_cgemv_adjoint_serial(benchmark::State& state) {
  GemvFixture f(state.range(0), state.range(1));
  for (auto _ : state) {
    kernels::cgemv_adjoint_serial(f.a, f.w, f.y);
    benchmark::DoNotOptimize(f.y.data());
  }
}

void BM_cgemv_adjoint_parallel(benchmark::State& state) {
  GemvFixture f(state.range(0), state.range(1));
  for (auto _ : state) {
    kernels::cgemv_adjoint_parallel(f.a, f.w, f.y);
    benchmark::DoNotOptimize(f.y.data());
  }
}

void BM_penalty_serial(benchmark::State& state) {
  auto eng = make_engine(3);
  ComplexVector u = complex_gaussian(state.range(0), eng);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::penalty_sum_serial(u, 1.7));
}

void BM_penalty_parallel(benchmark::State& state) {
  auto eng = make_engine(3);
  ComplexVector u = complex_gaussian(state.range(0), eng);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::penalty_sum_parallel(u, 1.7));
}

void BM_hadamard_serial(benchmark::State& state) {
  auto eng = make_engine(4);
  ComplexVector a = complex_gaussian(state.range(0), eng);
  ComplexVector b = complex_gaussian(state.range(0), eng);
  ComplexVector out;
  for (auto _ : state) {
    kernels::hadamard_conj_serial(a, b, out);
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_hadamard_parallel(benchmark::State& state) {
  auto eng = make_engine(4);
  ComplexVector a = complex_gaussian(state.range(0), eng);
  ComplexVector b = complex_gaussian(state.range(0), eng);
  ComplexVector out;
  for (auto _ : state) {
    kernels::hadamard_conj_parallel(a, b, out);
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_apply_forward(benchmark::State& state) {
  int L = state.range(0), K = state.range(1), N = state.range(1);
  MeasurementOperator op(L, make_partial_dft_b(L, K), DenseGaussianC{N, 9});
  auto eng = make_engine(5);
  ComplexVector h = complex_gaussian(K, eng);
  ComplexVector m = complex_gaussian(N, eng);
  for (auto _ : state) {
    ComplexVector y = op.apply_forward(h, m);
    benchmark::DoNotOptimize(y.data());
  }
}

}  // namespace

BENCHMARK(BM_cgemv_serial)->Args({600, 100})->Args({4096, 256})->Args({65536, 64});
BENCHMARK(BM_cgemv_parallel)->Args({600, 100})->Args({4096, 256})->Args({65536, 64});
BENCHMARK(BM_cgemv_adjoint_serial)->Args({600, 100})->Args({4096, 256})->Args({65536, 64});
BENCHMARK(BM_cgemv_adjoint_parallel)->Args({600, 100})->Args({4096, 256})->Args({65536, 64});
BENCHMARK(BM_penalty_serial)->Arg(600)->Arg(65536);
BENCHMARK(BM_penalty_parallel)->Arg(600)->Arg(65536);
BENCHMARK(BM_hadamard_serial)->Arg(600)->Arg(65536);
BENCHMARK(BM_hadamard_parallel)->Arg(600)->Arg(65536);
BENCHMARK(BM_apply_forward)->Args({600, 100})->Args({4096, 64});

BENCHMARK_MAIN();
