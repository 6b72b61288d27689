// OpenMP sector kernels against the serial reference versions.
#include <random>

#include <benchmark/benchmark.h>
#include <omp.h>

#include "picklab/second_quantization.hpp"

using namespace picklab;

namespace {

Matrix random_matrix(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = cplx(g(rng), g(rng));
  return m;
}

// args: N, d
void one_body_parallel(benchmark::State& st) {
  const SectorBasis b(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)));
  const Matrix A = random_matrix(b.modes(), 1);
  for (auto _ : st) benchmark::DoNotOptimize(second_quantize(A, b));
  st.counters["D"] = static_cast<double>(b.size());
  st.counters["threads"] = omp_get_max_threads();
}

void one_body_serial(benchmark::State& st) {
  const SectorBasis b(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)));
  const Matrix A = random_matrix(b.modes(), 1);
  for (auto _ : st) benchmark::DoNotOptimize(reference::second_quantize(A, b));
  st.counters["D"] = static_cast<double>(b.size());
}

void two_body_parallel(benchmark::State& st) {
  const SectorBasis b(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)));
  const Matrix W = random_matrix(b.modes() * b.modes(), 2);
  for (auto _ : st) benchmark::DoNotOptimize(second_quantize_two_body(W, b));
  st.counters["D"] = static_cast<double>(b.size());
  st.counters["threads"] = omp_get_max_threads();
}

void two_body_serial(benchmark::State& st) {
  const SectorBasis b(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)));
  const Matrix W = random_matrix(b.modes() * b.modes(), 2);
  for (auto _ : st) benchmark::DoNotOptimize(reference::second_quantize_two_body(W, b));
  st.counters["D"] = static_cast<double>(b.size());
}

}  // namespace

#define SIZES Args({4, 4})->Args({6, 6})->Args({8, 6})->Args({6, 8})->Unit(benchmark::kMicrosecond)
BENCHMARK(one_body_serial)->SIZES;
BENCHMARK(one_body_parallel)->SIZES;
BENCHMARK(two_body_serial)->SIZES;
BENCHMARK(two_body_parallel)->SIZES;

BENCHMARK_MAIN();
