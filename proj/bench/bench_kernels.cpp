// Serial twin vs OpenMP kernel, same inputs. The /threads argument of the
// OpenMP runs sets omp_set_num_threads; serial runs ignore it.

#include <benchmark/benchmark.h>
#include <omp.h>

#include <random>
#include <vector>

#include "tomd/kernels.hpp"
#include "tomd/tomd.hpp"

namespace k = tomd::kernels;

namespace {

std::vector<double> buffer(std::size_t n) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  std::vector<double> v(n);
  for (auto& x : v) x = g(rng);
  return v;
}

Eigen::MatrixXd matrix(Eigen::Index r, Eigen::Index c) {
  auto v = buffer(static_cast<std::size_t>(r * c));
  return Eigen::Map<Eigen::MatrixXd>(v.data(), r, c);
}

// 32^4 tensor, mode 2 in the middle
constexpr k::ModeBlock kBlock{32 * 32, 32, 32};
constexpr std::size_t kSize = 32 * 32 * 32 * 32;

void threads(benchmark::State& st) { omp_set_num_threads(static_cast<int>(st.range(0))); }

void set_bytes(benchmark::State& st, std::size_t doubles) {
  st.SetBytesProcessed(static_cast<std::int64_t>(st.iterations() * doubles * sizeof(double)));
}

template <bool Parallel>
void BM_unfold(benchmark::State& st) {
  threads(st);
  auto in = buffer(kSize);
  std::vector<double> out(kSize);
  for (auto _ : st) {
    if (Parallel) k::unfold_mode(in, kBlock, out);
    else k::serial::unfold_mode(in, kBlock, out);
    benchmark::DoNotOptimize(out.data());
  }
  set_bytes(st, 2 * kSize);
}

template <bool Parallel>
void BM_mode_product(benchmark::State& st) {
  threads(st);
  auto in = buffer(kSize);
  const auto m = matrix(16, 32);
  std::vector<double> out(kSize / 2);
  for (auto _ : st) {
    if (Parallel) k::mode_product(in, kBlock, m, out);
    else k::serial::mode_product(in, kBlock, m, out);
    benchmark::DoNotOptimize(out.data());
  }
}

template <bool Parallel>
void BM_permute(benchmark::State& st) {
  threads(st);
  auto in = buffer(kSize);
  std::vector<double> out(kSize);
  const std::size_t shape[4] = {32, 32, 32, 32};
  const std::size_t perm[4] = {3, 1, 0, 2};
  for (auto _ : st) {
    if (Parallel) k::permute(in, shape, perm, out);
    else k::serial::permute(in, shape, perm, out);
    benchmark::DoNotOptimize(out.data());
  }
  set_bytes(st, 2 * kSize);
}

template <bool Parallel>
void BM_pairwise(benchmark::State& st) {
  threads(st);
  const std::vector<Eigen::MatrixXd> views{matrix(64, 400), matrix(48, 400)};
  for (auto _ : st) {
    auto d = Parallel ? k::pairwise_sq_distances(views) : k::serial::pairwise_sq_distances(views);
    benchmark::DoNotOptimize(d.data());
  }
}

template <bool Parallel>
void BM_column_shrink(benchmark::State& st) {
  threads(st);
  const auto h = matrix(512, 2000);
  for (auto _ : st) {
    auto e = Parallel ? k::column_shrink(h, 20.0) : k::serial::column_shrink(h, 20.0);
    benchmark::DoNotOptimize(e.data());
  }
}

// End to end: five TOMD-ALS sweeps on a 16^4 tensor.
void BM_tomd_als(benchmark::State& st) {
  threads(st);
  auto v = buffer(16 * 16 * 16 * 16);
  tomd::Tensor x({16, 16, 16, 16}, std::move(v));
  for (auto _ : st) {
    auto r = tomd::tomd_als(x, tomd::TomdRank::uniform(4), tomd::AlsConfig{5, 1e-300, 0, false});
    benchmark::DoNotOptimize(r.report.final_rse);
  }
}

void thread_args(benchmark::internal::Benchmark* b) {
  const int hw = omp_get_num_procs();
  for (int t = 1; t <= hw; t *= 2) b->Arg(t);
  if ((hw & (hw - 1)) != 0) b->Arg(hw);
}

}  // namespace

BENCHMARK(BM_unfold<false>)->Arg(1);
BENCHMARK(BM_unfold<true>)->Apply(thread_args);
BENCHMARK(BM_mode_product<false>)->Arg(1);
BENCHMARK(BM_mode_product<true>)->Apply(thread_args);
BENCHMARK(BM_permute<false>)->Arg(1);
BENCHMARK(BM_permute<true>)->Apply(thread_args);
BENCHMARK(BM_pairwise<false>)->Arg(1);
BENCHMARK(BM_pairwise<true>)->Apply(thread_args);
BENCHMARK(BM_column_shrink<false>)->Arg(1);
BENCHMARK(BM_column_shrink<true>)->Apply(thread_args);
BENCHMARK(BM_tomd_als)->Apply(thread_args)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
