// Copyright 2026 The TextForge Authors.
// SPDX-License-Identifier: Apache-2.0

// Forward compute kernels shared by the eager engine and the graph runtime.
//
// Two implementations exist for every kernel:
//   serial::  straightforward reference loops, kept for testing and benchmarks
//   omp::     OpenMP data-parallel versions (parallel over independent rows)
// Both accumulate every output element in the same order, so their results
// are bitwise identical. The unqualified functions in this namespace dispatch
// to omp:: and are what the rest of the library calls.
//
// Layouts are row-major. `lengths` arrays give the number of valid leading
// positions per batch row; nullptr means every position is valid.

#pragma once

#include <cmath>
#include <cstdint>

namespace textforge::kernels {

using Index = std::int64_t;

/// Work (multiply-adds) below which the omp:: kernels stay single-threaded.
inline constexpr Index kParallelThreshold = Index{1} << 15;

inline float sigmoid(float x) { return 1.0f / (1.0f + std::exp(-x)); }
inline float relu(float x) { return x > 0.0f ? x : 0.0f; }

/// Offset of the first window row for a sequence of `len` under width `w`.
/// Shorter sequences are left-padded with zero rows up to `w`.
inline Index conv_pad(Index len, Index w) { return len < w ? w - len : 0; }

#define TEXTFORGE_KERNEL_DECLS                                                          \
  /* y[M,N] = bias[N] + x[M,K] w[K,N]; bias may be null. */                            \
  void linear(const float* x, const float* w, const float* bias, float* y, Index M,   \
              Index K, Index N);                                                       \
  /* c[M,N] += a[M,K] b[N,K]^T */                                                      \
  void matmul_bt_acc(const float* a, const float* b, float* c, Index M, Index K,       \
                     Index N);                                                         \
  /* c[K,N] += a[M,K]^T b[M,N] */                                                      \
  void matmul_at_acc(const float* a, const float* b, float* c, Index M, Index K,       \
                     Index N);                                                         \
  /* Max-over-time of a width-W convolution. out[B,F]; argmax[B,F] receives the */     \
  /* winning window start in padded coordinates (may be null). Optional bias and */    \
  /* relu are applied after pooling. */                                                \
  void conv1d_maxpool(const float* x, const Index* lengths, Index B, Index T, Index D, \
                      const float* filters, Index W, Index F, const float* bias,       \
                      bool relu, float* out, std::int32_t* argmax);                    \
  /* One LSTM direction, gate order (i,f,g,o). h_out[B,T,H]. Optional caches: */       \
  /* gates[B,T,4H] post-activation and cell[B,T,H]. Masked steps copy state. */        \
  void lstm_sequence(const float* x, const Index* lengths, Index B, Index T, Index D,  \
                     Index H, const float* w_ih, const float* w_hh, const float* bias, \
                     bool reverse, float* h_out, float* gates, float* cell);           \
  /* alpha = softmax_t(w2 . tanh(H_t w1)) over valid t; out[B,Hd] = sum alpha_t H_t. */ \
  /* Optional caches alpha[B,T] and u[B,T,A] (the tanh activations). */               \
  void self_attention(const float* hs, const Index* lengths, Index B, Index T,         \
                      Index Hd, const float* w1, const float* w2, Index A, float* out, \
                      float* alpha, float* u);                                         \
  /* Row-wise log-sum-exp stabilized softmax. */                                       \
  void softmax_rows(const float* x, float* y, Index M, Index N);                       \
  /* out[n, D] = table[ids[n], :]. ids must already be range-checked. */               \
  void embedding_gather(const float* table, Index D, const std::int32_t* ids, Index n, \
                        float* out);

namespace serial {
TEXTFORGE_KERNEL_DECLS
}  // namespace serial

namespace omp {
TEXTFORGE_KERNEL_DECLS
}  // namespace omp

#undef TEXTFORGE_KERNEL_DECLS

using omp::conv1d_maxpool;
using omp::embedding_gather;
using omp::linear;
using omp::lstm_sequence;
using omp::matmul_at_acc;
using omp::matmul_bt_acc;
using omp::self_attention;
using omp::softmax_rows;

}  // namespace textforge::kernels
