// Copyright 2026 The TextForge Authors.
// SPDX-License-Identifier: Apache-2.0

// Serial reference kernels against the OpenMP versions.

#include <benchmark/benchmark.h>

#include <vector>

#include "textforge/kernels.hpp"
#include "textforge/rng.hpp"

namespace k = textforge::kernels;

namespace {

std::vector<float> rand_vec(std::size_t n, std::uint64_t seed) {
  textforge::Rng rng(seed);
  std::vector<float> v(n);
  rng.fill_uniform(v, -1.0f, 1.0f);
  return v;
}

template <bool Omp>
void BM_Linear(benchmark::State& state) {
  const k::Index M = state.range(0), K = 256, N = 256;
  const auto x = rand_vec(M * K, 1), w = rand_vec(K * N, 2), b = rand_vec(N, 3);
  std::vector<float> y(M * N);
  for (auto _ : state) {
    if constexpr (Omp) {
      k::omp::linear(x.data(), w.data(), b.data(), y.data(), M, K, N);
    } else {
      k::serial::linear(x.data(), w.data(), b.data(), y.data(), M, K, N);
    }
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * M * K * N);
}

template <bool Omp>
void BM_ConvMaxPool(benchmark::State& state) {
  const k::Index B = state.range(0), T = 32, D = 64, W = 3, F = 64;
  const auto x = rand_vec(B * T * D, 4), f = rand_vec(W * D * F, 5), b = rand_vec(F, 6);
  std::vector<float> out(B * F);
  std::vector<std::int32_t> am(B * F);
  for (auto _ : state) {
    if constexpr (Omp) {
      k::omp::conv1d_maxpool(x.data(), nullptr, B, T, D, f.data(), W, F, b.data(), true, out.data(), am.data());
    } else {
      k::serial::conv1d_maxpool(x.data(), nullptr, B, T, D, f.data(), W, F, b.data(), true, out.data(), am.data());
    }
    benchmark::DoNotOptimize(out.data());
  }
}

template <bool Omp>
void BM_Lstm(benchmark::State& state) {
  const k::Index B = state.range(0), T = 24, D = 64, H = 64;
  const auto x = rand_vec(B * T * D, 7), wi = rand_vec(D * 4 * H, 8), wh = rand_vec(H * 4 * H, 9),
             b = rand_vec(4 * H, 10);
  std::vector<float> h(B * T * H);
  for (auto _ : state) {
    if constexpr (Omp) {
      k::omp::lstm_sequence(x.data(), nullptr, B, T, D, H, wi.data(), wh.data(), b.data(), false, h.data(), nullptr,
                            nullptr);
    } else {
      k::serial::lstm_sequence(x.data(), nullptr, B, T, D, H, wi.data(), wh.data(), b.data(), false, h.data(),
                               nullptr, nullptr);
    }
    benchmark::DoNotOptimize(h.data());
  }
}

}  // namespace

BENCHMARK(BM_Linear<false>)->Arg(1)->Arg(64)->Arg(512);
BENCHMARK(BM_Linear<true>)->Arg(1)->Arg(64)->Arg(512);
BENCHMARK(BM_ConvMaxPool<false>)->Arg(1)->Arg(64);
BENCHMARK(BM_ConvMaxPool<true>)->Arg(1)->Arg(64);
BENCHMARK(BM_Lstm<false>)->Arg(1)->Arg(32);
BENCHMARK(BM_Lstm<true>)->Arg(1)->Arg(32);

BENCHMARK_MAIN();
