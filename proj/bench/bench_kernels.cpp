// Serial reference vs OpenMP for the hot kernels. Thread count comes from
// OMP_NUM_THREADS; on one core the OpenMP rows show scheduling overhead only.

#include <random>

#include <benchmark/benchmark.h>

#include "qcomb/kernels.hpp"
#include "qcomb/sdp.hpp"
#include "qcomb/theorems.hpp"

using namespace qcomb;

namespace {

CMat random_matrix(Index n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  CMat m(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) m(i, j) = cplx(g(rng), g(rng));
  return m;
}

std::vector<int> qubit_dims(int q) { return std::vector<int>(q, 2); }

std::vector<int> reversed(int q) {
  std::vector<int> o(q);
  for (int k = 0; k < q; ++k) o[k] = q - 1 - k;
  return o;
}

template <CMat (*Fn)(const CMat&, const std::vector<Index>&)>
void BM_gather(benchmark::State& st) {
  const int q = static_cast<int>(st.range(0));
  const CMat m = random_matrix(Index(1) << q, 1);
  const auto map = kernels::permutation_map(qubit_dims(q), reversed(q));
  for (auto _ : st) benchmark::DoNotOptimize(Fn(m, map));
}

template <CMat (*Fn)(const CMat&, const std::vector<int>&, const std::vector<bool>&)>
void BM_partial_trace(benchmark::State& st) {
  const int q = static_cast<int>(st.range(0));
  const CMat m = random_matrix(Index(1) << q, 2);
  std::vector<bool> tr(q, false);
  for (int k = 0; k < q; k += 2) tr[k] = true;
  for (auto _ : st) benchmark::DoNotOptimize(Fn(m, qubit_dims(q), tr));
}

template <CMat (*Fn)(std::size_t, const std::vector<double>&, const kernels::TermFn&, Index, Index)>
void BM_weighted_sum(benchmark::State& st) {
  const std::size_t count = static_cast<std::size_t>(st.range(0));
  const CMat a = random_matrix(64, 3);
  std::vector<double> w(count, 1.0 / count);
  kernels::TermFn term = [&](std::size_t k) -> CMat { return a * a.adjoint() * double(k); };
  for (auto _ : st) benchmark::DoNotOptimize(Fn(count, w, term, 64, 64));
}

template <RMat (*Fn)(const SdpProblem&, const std::vector<CMat>&)>
void BM_schur(benchmark::State& st) {
  const auto& cs = full_system(StrategyKind::ico, 2);
  CMat a = random_matrix(64, 4);
  const std::vector<CMat> w{a * a.adjoint() / 64.0 + CMat::Identity(64, 64)};
  for (auto _ : st) benchmark::DoNotOptimize(Fn(cs.problem, w));
}

}  // namespace

BENCHMARK(BM_gather<kernels::gather_serial>)->Name("gather/serial")->Arg(6)->Arg(8)->Arg(10);
BENCHMARK(BM_gather<kernels::gather_omp>)->Name("gather/omp")->Arg(6)->Arg(8)->Arg(10);
BENCHMARK(BM_partial_trace<kernels::partial_trace_serial>)->Name("partial_trace/serial")->Arg(6)->Arg(8)->Arg(10);
BENCHMARK(BM_partial_trace<kernels::partial_trace_omp>)->Name("partial_trace/omp")->Arg(6)->Arg(8)->Arg(10);
BENCHMARK(BM_weighted_sum<kernels::weighted_sum_serial>)->Name("weighted_sum/serial")->Arg(64)->Arg(512);
BENCHMARK(BM_weighted_sum<kernels::weighted_sum_omp>)->Name("weighted_sum/omp")->Arg(64)->Arg(512);
BENCHMARK(BM_schur<schur_complement_serial>)->Name("schur/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_schur<schur_complement_omp>)->Name("schur/omp")->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
