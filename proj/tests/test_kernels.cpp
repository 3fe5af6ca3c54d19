// Copyright 2026 The TextForge Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cstring>

#include "test_util.hpp"
#include "textforge/kernels.hpp"

using namespace textforge;
namespace k = textforge::kernels;
using tf_test::random_values;

namespace {

bool bitwise_equal(const std::vector<float>& a, const std::vector<float>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(float)) == 0;
}

// Small and above-threshold sizes, so both omp code paths run.
struct Size {
  k::Index M, K, N;
};
const Size kSizes[] = {{1, 1, 1}, {3, 5, 2}, {17, 9, 13}, {64, 96, 80}, {300, 64, 40}};

}  // namespace

TEST(Kernels, LinearHandValues) {
  const float x[] = {1, 2, 3, 4};      // [2,2]
  const float w[] = {1, 0, 2, 1, 1, 0};  // [2,3]
  const float b[] = {0.5f, -1, 0};
  float y[6];
  k::serial::linear(x, w, b, y, 2, 2, 3);
  const float want[] = {3.5f, 1, 2, 7.5f, 3, 6};
  for (int i = 0; i < 6; ++i) EXPECT_FLOAT_EQ(y[i], want[i]);
}

TEST(Kernels, LinearSerialEqualsOmp) {
  Rng rng(1);
  for (auto [M, K, N] : kSizes) {
    const auto x = random_values(rng, M * K), w = random_values(rng, K * N), b = random_values(rng, N);
    std::vector<float> ys(M * N), yo(M * N);
    k::serial::linear(x.data(), w.data(), b.data(), ys.data(), M, K, N);
    k::omp::linear(x.data(), w.data(), b.data(), yo.data(), M, K, N);
    EXPECT_TRUE(bitwise_equal(ys, yo)) << M << "x" << K << "x" << N;
  }
}

TEST(Kernels, MatmulAccumulatorsSerialEqualsOmp) {
  Rng rng(2);
  for (auto [M, K, N] : kSizes) {
    const auto a = random_values(rng, M * K), bt = random_values(rng, N * K), bm = random_values(rng, M * N);
    const auto c0 = random_values(rng, M * N), c1 = random_values(rng, K * N);
    auto cs = c0, co = c0;
    k::serial::matmul_bt_acc(a.data(), bt.data(), cs.data(), M, K, N);
    k::omp::matmul_bt_acc(a.data(), bt.data(), co.data(), M, K, N);
    EXPECT_TRUE(bitwise_equal(cs, co));
    auto ds = c1, dom = c1;
    k::serial::matmul_at_acc(a.data(), bm.data(), ds.data(), M, K, N);
    k::omp::matmul_at_acc(a.data(), bm.data(), dom.data(), M, K, N);
    EXPECT_TRUE(bitwise_equal(ds, dom));
  }
}

TEST(Kernels, ConvMaxPoolHandValues) {
  // x = [1, 2, 3] (D=1), one width-2 filter [1, 1]: windows 3, 5 -> max 5 at s=1.
  const float x[] = {1, 2, 3}, f[] = {1, 1};
  float out;
  std::int32_t am;
  k::serial::conv1d_maxpool(x, nullptr, 1, 3, 1, f, 2, 1, nullptr, false, &out, &am);
  EXPECT_FLOAT_EQ(out, 5.0f);
  EXPECT_EQ(am, 1);
  // Length 1 under width 2: left pad one zero row -> single window 0*1 + 1*1.
  const k::Index len = 1;
  k::serial::conv1d_maxpool(x, &len, 1, 3, 1, f, 2, 1, nullptr, false, &out, &am);
  EXPECT_FLOAT_EQ(out, 1.0f);
}

TEST(Kernels, ConvSerialEqualsOmp) {
  Rng rng(3);
  for (k::Index B : {1, 4, 130}) {
    const k::Index T = 9, D = 6, W = 3, F = 5;
    const auto x = random_values(rng, B * T * D), f = random_values(rng, W * D * F), b = random_values(rng, F);
    std::vector<k::Index> lens(B);
    for (k::Index i = 0; i < B; ++i) lens[i] = 1 + static_cast<k::Index>(rng.below(T));
    std::vector<float> os(B * F), oo(B * F);
    std::vector<std::int32_t> as(B * F), ao(B * F);
    k::serial::conv1d_maxpool(x.data(), lens.data(), B, T, D, f.data(), W, F, b.data(), true, os.data(), as.data());
    k::omp::conv1d_maxpool(x.data(), lens.data(), B, T, D, f.data(), W, F, b.data(), true, oo.data(), ao.data());
    EXPECT_TRUE(bitwise_equal(os, oo));
    EXPECT_EQ(as, ao);
  }
}

TEST(Kernels, LstmSerialEqualsOmp) {
  Rng rng(4);
  for (k::Index B : {1, 3, 40}) {
    const k::Index T = 7, D = 5, H = 4;
    const auto x = random_values(rng, B * T * D), wi = random_values(rng, D * 4 * H),
               wh = random_values(rng, H * 4 * H), b = random_values(rng, 4 * H);
    std::vector<k::Index> lens(B);
    for (k::Index i = 0; i < B; ++i) lens[i] = 1 + static_cast<k::Index>(rng.below(T));
    for (bool rev : {false, true}) {
      std::vector<float> hs(B * T * H), ho(B * T * H), gs(B * T * 4 * H), go(B * T * 4 * H), cs(B * T * H),
          co(B * T * H);
      k::serial::lstm_sequence(x.data(), lens.data(), B, T, D, H, wi.data(), wh.data(), b.data(), rev, hs.data(),
                               gs.data(), cs.data());
      k::omp::lstm_sequence(x.data(), lens.data(), B, T, D, H, wi.data(), wh.data(), b.data(), rev, ho.data(),
                            go.data(), co.data());
      EXPECT_TRUE(bitwise_equal(hs, ho));
      EXPECT_TRUE(bitwise_equal(gs, go));
      EXPECT_TRUE(bitwise_equal(cs, co));
    }
  }
}

TEST(Kernels, LstmMaskedStepsCopyState) {
  Rng rng(5);
  const k::Index T = 4, D = 2, H = 3;
  const auto x = random_values(rng, T * D), wi = random_values(rng, D * 4 * H), wh = random_values(rng, H * 4 * H),
             b = random_values(rng, 4 * H);
  const k::Index len = 2;
  std::vector<float> h(T * H);
  k::serial::lstm_sequence(x.data(), &len, 1, T, D, H, wi.data(), wh.data(), b.data(), false, h.data(), nullptr,
                           nullptr);
  for (k::Index t = 2; t < T; ++t) {
    for (k::Index j = 0; j < H; ++j) EXPECT_EQ(h[t * H + j], h[1 * H + j]);
  }
}

TEST(Kernels, AttentionSerialEqualsOmp) {
  Rng rng(6);
  for (k::Index B : {1, 5, 70}) {
    const k::Index T = 6, Hd = 8, A = 4;
    const auto hs = random_values(rng, B * T * Hd), w1 = random_values(rng, Hd * A), w2 = random_values(rng, A);
    std::vector<k::Index> lens(B);
    for (k::Index i = 0; i < B; ++i) lens[i] = 1 + static_cast<k::Index>(rng.below(T));
    std::vector<float> os(B * Hd), oo(B * Hd), as(B * T), ao(B * T);
    k::serial::self_attention(hs.data(), lens.data(), B, T, Hd, w1.data(), w2.data(), A, os.data(), as.data(),
                              nullptr);
    k::omp::self_attention(hs.data(), lens.data(), B, T, Hd, w1.data(), w2.data(), A, oo.data(), ao.data(),
                           nullptr);
    EXPECT_TRUE(bitwise_equal(os, oo));
    EXPECT_TRUE(bitwise_equal(as, ao));
    for (k::Index b = 0; b < B; ++b) {
      float sum = 0;
      for (k::Index t = 0; t < T; ++t) {
        if (t >= lens[b]) {
          EXPECT_EQ(as[b * T + t], 0.0f);
        }
        sum += as[b * T + t];
      }
      EXPECT_NEAR(sum, 1.0f, 1e-5);
    }
  }
}

TEST(Kernels, SoftmaxAndGather) {
  const float x[] = {0, 0, 1000, 1000, 0, -1000};
  float y[6];
  k::omp::softmax_rows(x, y, 2, 3);
  EXPECT_NEAR(y[0], 0.0f, 1e-6);
  EXPECT_NEAR(y[2], 1.0f, 1e-6);
  EXPECT_NEAR(y[3], 1.0f, 1e-6);
  Rng rng(7);
  const auto table = random_values(rng, 50 * 4);
  std::vector<std::int32_t> ids = {3, 0, 49, 3};
  std::vector<float> gs(16), go(16);
  k::serial::embedding_gather(table.data(), 4, ids.data(), 4, gs.data());
  k::omp::embedding_gather(table.data(), 4, ids.data(), 4, go.data());
  EXPECT_TRUE(bitwise_equal(gs, go));
  EXPECT_EQ(gs[8], table[49 * 4]);
}
