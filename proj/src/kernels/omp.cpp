// Copyright 2026 The TextForge Authors.
// SPDX-License-Identifier: Apache-2.0

// OpenMP kernels. Parallelism is over independent output rows (or batch
// rows for the sequence kernels); the accumulation order of every output
// element matches serial:: exactly.

#include <omp.h>

#include <algorithm>
#include <cstring>
#include <limits>
#include <vector>

#include "textforge/kernels.hpp"

namespace textforge::kernels::omp {
namespace {

// Per-thread scratch; grows to the largest request and is then reused, so
// steady-state calls do not allocate.
float* scratch(std::size_t n) {
  thread_local std::vector<float> buf;
  if (buf.size() < n) buf.resize(n);
  return buf.data();
}

void lstm_row(const float* x, Index len, Index T, Index D, Index H, const float* w_ih,
              const float* w_hh, const float* bias, bool reverse, float* h_out, float* gates,
              float* cell) {
  float* s = scratch(static_cast<std::size_t>(7 * H));
  float* h = s;
  float* c = s + H;
  float* a = s + 2 * H;
  float* h_new = s + 6 * H;
  std::fill_n(h, H, 0.0f);
  std::fill_n(c, H, 0.0f);
  const Index G = 4 * H;
  for (Index step = 0; step < T; ++step) {
    const Index t = reverse ? T - 1 - step : step;
    float* ho = h_out + t * H;
    if (t >= len) {
      std::copy_n(h, H, ho);
      if (gates) std::fill_n(gates + t * G, G, 0.0f);
      if (cell) std::copy_n(c, H, cell + t * H);
      continue;
    }
    const float* xt = x + t * D;
    std::copy_n(bias, G, a);
    for (Index k = 0; k < D; ++k) {
      const float xk = xt[k];
      const float* wr = w_ih + k * G;
      for (Index j = 0; j < G; ++j) a[j] += xk * wr[j];
    }
    for (Index k = 0; k < H; ++k) {
      const float hk = h[k];
      const float* wr = w_hh + k * G;
      for (Index j = 0; j < G; ++j) a[j] += hk * wr[j];
    }
    for (Index j = 0; j < H; ++j) {
      const float ig = sigmoid(a[j]);
      const float fg = sigmoid(a[H + j]);
      const float gg = std::tanh(a[2 * H + j]);
      const float og = sigmoid(a[3 * H + j]);
      c[j] = fg * c[j] + ig * gg;
      h_new[j] = og * std::tanh(c[j]);
      if (gates) {
        float* g = gates + t * G;
        g[j] = ig;
        g[H + j] = fg;
        g[2 * H + j] = gg;
        g[3 * H + j] = og;
      }
    }
    std::copy_n(h_new, H, h);
    std::copy_n(h, H, ho);
    if (cell) std::copy_n(c, H, cell + t * H);
  }
}

void attention_row(const float* hs, Index len, Index T, Index Hd, const float* w1,
                   const float* w2, Index A, float* out, float* alpha, float* u) {
  float* s = scratch(static_cast<std::size_t>(2 * T + A));
  float* scores = s;
  float* al = s + T;
  float* uu = s + 2 * T;
  for (Index t = 0; t < len; ++t) {
    const float* ht = hs + t * Hd;
    std::fill_n(uu, A, 0.0f);
    for (Index k = 0; k < Hd; ++k) {
      const float hk = ht[k];
      const float* wr = w1 + k * A;
      for (Index a = 0; a < A; ++a) uu[a] += hk * wr[a];
    }
    float sc = 0.0f;
    for (Index a = 0; a < A; ++a) {
      uu[a] = std::tanh(uu[a]);
      if (u) u[t * A + a] = uu[a];
    }
    for (Index a = 0; a < A; ++a) sc += w2[a] * uu[a];
    scores[t] = sc;
  }
  float m = -std::numeric_limits<float>::infinity();
  for (Index t = 0; t < len; ++t) m = std::max(m, scores[t]);
  float z = 0.0f;
  for (Index t = 0; t < len; ++t) {
    al[t] = std::exp(scores[t] - m);
    z += al[t];
  }
  for (Index t = 0; t < T; ++t) {
    const float v = t < len ? al[t] / z : 0.0f;
    al[t] = v;
    if (alpha) alpha[t] = v;
    if (u && t >= len) std::fill_n(u + t * A, A, 0.0f);
  }
  std::fill_n(out, Hd, 0.0f);
  for (Index t = 0; t < len; ++t) {
    const float at = al[t];
    const float* ht = hs + t * Hd;
    for (Index j = 0; j < Hd; ++j) out[j] += at * ht[j];
  }
}

}  // namespace

void linear(const float* x, const float* w, const float* bias, float* y, Index M, Index K,
            Index N) {
#pragma omp parallel for schedule(static) if (M * K * N >= kParallelThreshold && M > 1)
  for (Index i = 0; i < M; ++i) {
    float* yi = y + i * N;
    if (bias) {
      std::copy_n(bias, N, yi);
    } else {
      std::fill_n(yi, N, 0.0f);
    }
    const float* xi = x + i * K;
    for (Index k = 0; k < K; ++k) {
      const float xk = xi[k];
      const float* wr = w + k * N;
      for (Index j = 0; j < N; ++j) yi[j] += xk * wr[j];
    }
  }
}

void matmul_bt_acc(const float* a, const float* b, float* c, Index M, Index K, Index N) {
#pragma omp parallel for schedule(static) if (M * K * N >= kParallelThreshold && M > 1)
  for (Index i = 0; i < M; ++i) {
    const float* ai = a + i * K;
    for (Index j = 0; j < N; ++j) {
      const float* bj = b + j * K;
      float acc = c[i * N + j];
      for (Index k = 0; k < K; ++k) acc += ai[k] * bj[k];
      c[i * N + j] = acc;
    }
  }
}

void matmul_at_acc(const float* a, const float* b, float* c, Index M, Index K, Index N) {
#pragma omp parallel for schedule(static) if (M * K * N >= kParallelThreshold && K > 1)
  for (Index k = 0; k < K; ++k) {
    float* ck = c + k * N;
    for (Index m = 0; m < M; ++m) {
      const float amk = a[m * K + k];
      const float* bm = b + m * N;
      for (Index n = 0; n < N; ++n) ck[n] += amk * bm[n];
    }
  }
}

void conv1d_maxpool(const float* x, const Index* lengths, Index B, Index T, Index D,
                    const float* filters, Index W, Index F, const float* bias, bool relu,
                    float* out, std::int32_t* argmax) {
  const Index work = B * T * W * D * F;
#pragma omp parallel for schedule(static) if (work >= kParallelThreshold && B > 1)
  for (Index b = 0; b < B; ++b) {
    const Index len = lengths ? lengths[b] : T;
    const Index pad = conv_pad(len, W);
    const Index windows = len + pad - W + 1;
    float* acc = scratch(static_cast<std::size_t>(2 * F));
    float* best = acc + F;
    std::int32_t* arg = argmax ? argmax + b * F : nullptr;
    for (Index s = 0; s < windows; ++s) {
      std::fill_n(acc, F, 0.0f);
      for (Index o = 0; o < W; ++o) {
        const Index row = s + o - pad;
        if (row < 0) continue;
        const float* xr = x + (b * T + row) * D;
        for (Index d = 0; d < D; ++d) {
          const float xv = xr[d];
          const float* fr = filters + (o * D + d) * F;
          for (Index f = 0; f < F; ++f) acc[f] += xv * fr[f];
        }
      }
      for (Index f = 0; f < F; ++f) {
        if (s == 0 || acc[f] > best[f]) {
          best[f] = acc[f];
          if (arg) arg[f] = static_cast<std::int32_t>(s);
        }
      }
    }
    for (Index f = 0; f < F; ++f) {
      float v = best[f];
      if (bias) v += bias[f];
      if (relu) v = kernels::relu(v);
      out[b * F + f] = v;
    }
  }
}

void lstm_sequence(const float* x, const Index* lengths, Index B, Index T, Index D, Index H,
                   const float* w_ih, const float* w_hh, const float* bias, bool reverse,
                   float* h_out, float* gates, float* cell) {
  const Index work = B * T * (D + H) * 4 * H;
#pragma omp parallel for schedule(static) if (work >= kParallelThreshold && B > 1)
  for (Index b = 0; b < B; ++b) {
    lstm_row(x + b * T * D, lengths ? lengths[b] : T, T, D, H, w_ih, w_hh, bias, reverse,
             h_out + b * T * H, gates ? gates + b * T * 4 * H : nullptr,
             cell ? cell + b * T * H : nullptr);
  }
}

void self_attention(const float* hs, const Index* lengths, Index B, Index T, Index Hd,
                    const float* w1, const float* w2, Index A, float* out, float* alpha,
                    float* u) {
  const Index work = B * T * Hd * A;
#pragma omp parallel for schedule(static) if (work >= kParallelThreshold && B > 1)
  for (Index b = 0; b < B; ++b) {
    attention_row(hs + b * T * Hd, lengths ? lengths[b] : T, T, Hd, w1, w2, A, out + b * Hd,
                  alpha ? alpha + b * T : nullptr, u ? u + b * T * A : nullptr);
  }
}

void softmax_rows(const float* x, float* y, Index M, Index N) {
#pragma omp parallel for schedule(static) if (M * N >= kParallelThreshold)
  for (Index i = 0; i < M; ++i) {
    const float* xi = x + i * N;
    float* yi = y + i * N;
    float m = -std::numeric_limits<float>::infinity();
    for (Index j = 0; j < N; ++j) m = std::max(m, xi[j]);
    float z = 0.0f;
    for (Index j = 0; j < N; ++j) {
      yi[j] = std::exp(xi[j] - m);
      z += yi[j];
    }
    for (Index j = 0; j < N; ++j) yi[j] /= z;
  }
}

void embedding_gather(const float* table, Index D, const std::int32_t* ids, Index n,
                      float* out) {
#pragma omp parallel for schedule(static) if (n * D >= kParallelThreshold)
  for (Index i = 0; i < n; ++i) {
    std::memcpy(out + i * D, table + static_cast<Index>(ids[i]) * D,
                static_cast<std::size_t>(D) * sizeof(float));
  }
}

}  // namespace textforge::kernels::omp
