#include <benchmark/benchmark.h>

#include <vector>

#include "koco/kernels.hpp"
#include "koco/parallel.hpp"
#include "koco/rng.hpp"

namespace {

std::vector<koco::Point> cloud(std::size_t n, koco::Index dim) {
  koco::CounterRng rng(7);
  std::vector<koco::Point> pts(n, koco::DenseVec(dim));
  for (auto& p : pts)
    for (koco::Index i = 0; i < dim; ++i) p(i) = rng.normal();
  return pts;
}

Eigen::MatrixXd spd(koco::Index n) {
  const auto pts = cloud(static_cast<std::size_t>(n), 3);
  Eigen::MatrixXd m = koco::gram(koco::KernelSpec::gaussian(1.0), pts).matrix();
  m.diagonal().array() += 1.0;
  return m;
}

void BM_GramSerial(benchmark::State& st) {
  const auto pts = cloud(static_cast<std::size_t>(st.range(0)), 8);
  const auto k = koco::KernelSpec::gaussian(1.0);
  for (auto _ : st) benchmark::DoNotOptimize(koco::gram_serial(k, pts));
}
void BM_GramParallel(benchmark::State& st) {
  const auto pts = cloud(static_cast<std::size_t>(st.range(0)), 8);
  const auto k = koco::KernelSpec::gaussian(1.0);
  for (auto _ : st) benchmark::DoNotOptimize(koco::gram(k, pts));
}

void BM_CrossSerial(benchmark::State& st) {
  const auto pts = cloud(static_cast<std::size_t>(st.range(0)), 8);
  const auto k = koco::KernelSpec::gaussian(1.0);
  for (auto _ : st) benchmark::DoNotOptimize(koco::cross_vector_serial(k, pts, pts.front()));
}
void BM_CrossParallel(benchmark::State& st) {
  const auto pts = cloud(static_cast<std::size_t>(st.range(0)), 8);
  const auto k = koco::KernelSpec::gaussian(1.0);
  for (auto _ : st) benchmark::DoNotOptimize(koco::cross_vector(k, pts, pts.front()));
}

void BM_MatvecSerial(benchmark::State& st) {
  const koco::Index n = st.range(0);
  const Eigen::MatrixXd a = spd(n);
  const Eigen::VectorXd v = Eigen::VectorXd::Ones(n);
  Eigen::VectorXd out;
  for (auto _ : st) {
    koco::par::sym_matvec_serial(a, n, v, out);
    benchmark::DoNotOptimize(out.data());
  }
}
void BM_MatvecParallel(benchmark::State& st) {
  const koco::Index n = st.range(0);
  const Eigen::MatrixXd a = spd(n);
  const Eigen::VectorXd v = Eigen::VectorXd::Ones(n);
  Eigen::VectorXd out;
  for (auto _ : st) {
    koco::par::sym_matvec(a, n, v, out);
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_Rank1Serial(benchmark::State& st) {
  const koco::Index n = st.range(0);
  Eigen::MatrixXd a = spd(n);
  const Eigen::VectorXd w = Eigen::VectorXd::Constant(n, 1e-3);
  for (auto _ : st) koco::par::sym_rank1_update_serial(a, n, w, 1e-6);
}
void BM_Rank1Parallel(benchmark::State& st) {
  const koco::Index n = st.range(0);
  Eigen::MatrixXd a = spd(n);
  const Eigen::VectorXd w = Eigen::VectorXd::Constant(n, 1e-3);
  for (auto _ : st) koco::par::sym_rank1_update(a, n, w, 1e-6);
}

}  // namespace

BENCHMARK(BM_GramSerial)->Arg(256)->Arg(1024);
BENCHMARK(BM_GramParallel)->Arg(256)->Arg(1024);
BENCHMARK(BM_CrossSerial)->Arg(1024)->Arg(8192);
BENCHMARK(BM_CrossParallel)->Arg(1024)->Arg(8192);
BENCHMARK(BM_MatvecSerial)->Arg(512)->Arg(2048);
BENCHMARK(BM_MatvecParallel)->Arg(512)->Arg(2048);
BENCHMARK(BM_Rank1Serial)->Arg(512)->Arg(2048);
BENCHMARK(BM_Rank1Parallel)->Arg(512)->Arg(2048);

BENCHMARK_MAIN();
