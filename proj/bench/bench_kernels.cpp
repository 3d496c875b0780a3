// Serial vs OpenMP kernels. Args: {samples, dim}; parallel variants add a thread count.

#include "pcsft/kernels.hpp"

#include <benchmark/benchmark.h>
#include <omp.h>

namespace {

using namespace pcsft::kernels;

Eigen::MatrixXd test_root(Eigen::Index dim) {
  Eigen::MatrixXd r = Eigen::MatrixXd::Identity(dim, dim);
  r.diagonal(1).setConstant(0.5);
  return r;
}

FieldMatrix test_fields(Eigen::Index n, Eigen::Index dim) {
  FieldMatrix phi(n, dim);
  serial::gaussian_fields(test_root(dim), 17, 1, phi);
  return phi;
}

void set_threads(const benchmark::State& state) {
  omp_set_num_threads(state.range(2) > 0 ? static_cast<int>(state.range(2)) : 1);
}

template <bool Parallel>
void BM_GaussianFields(benchmark::State& state) {
  const Eigen::Index n = state.range(0), dim = state.range(1);
  const Eigen::MatrixXd root = test_root(dim);
  FieldMatrix out(n, dim);
  if constexpr (Parallel) set_threads(state);
  for (auto _ : state) {
    if constexpr (Parallel)
      parallel::gaussian_fields(root, 3, 1, out);
    else
      serial::gaussian_fields(root, 3, 1, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * n);
}

template <bool Parallel>
void BM_SecondMoment(benchmark::State& state) {
  const FieldMatrix phi = test_fields(state.range(0), state.range(1));
  if constexpr (Parallel) set_threads(state);
  for (auto _ : state) {
    Eigen::MatrixXd m = Parallel ? parallel::second_moment(phi) : serial::second_moment(phi);
    benchmark::DoNotOptimize(m.data());
  }
  state.SetItemsProcessed(state.iterations() * phi.rows());
}

template <bool Parallel>
void BM_QuadraticSeries(benchmark::State& state) {
  const Eigen::Index dim = state.range(1);
  const FieldMatrix phi = test_fields(state.range(0), dim);
  const Eigen::Index half = dim / 2;
  const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(half, half);
  if constexpr (Parallel) set_threads(state);
  for (auto _ : state) {
    Eigen::VectorXd s = Parallel ? parallel::quadratic_series(phi, 0, a) : serial::quadratic_series(phi, 0, a);
    benchmark::DoNotOptimize(s.data());
  }
  state.SetItemsProcessed(state.iterations() * phi.rows());
}

template <bool Parallel>
void BM_Mean(benchmark::State& state) {
  const Eigen::VectorXd x = test_fields(state.range(0), 1).col(0);
  if constexpr (Parallel) set_threads(state);
  for (auto _ : state) {
    double m = Parallel ? parallel::mean(x) : serial::mean(x);
    benchmark::DoNotOptimize(m);
  }
  state.SetItemsProcessed(state.iterations() * x.size());
}

void serial_args(benchmark::internal::Benchmark* b) {
  for (long n : {1L << 14, 200000L})
    for (long dim : {4L, 12L}) b->Args({n, dim, 0});
}

void parallel_args(benchmark::internal::Benchmark* b) {
  const long max_threads = omp_get_num_procs();
  for (long n : {1L << 14, 200000L})
    for (long dim : {4L, 12L})
      for (long t = 1; t <= max_threads; t *= 2) b->Args({n, dim, t});
}

}  // namespace

BENCHMARK(BM_GaussianFields<false>)->Apply(serial_args)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GaussianFields<true>)->Apply(parallel_args)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SecondMoment<false>)->Apply(serial_args)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SecondMoment<true>)->Apply(parallel_args)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_QuadraticSeries<false>)->Apply(serial_args)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_QuadraticSeries<true>)->Apply(parallel_args)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Mean<false>)->Apply(serial_args)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Mean<true>)->Apply(parallel_args)->Unit(benchmark::kMicrosecond)->UseRealTime();

BENCHMARK_MAIN();
