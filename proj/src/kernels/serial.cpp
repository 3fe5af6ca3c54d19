// Copyright 2026 The TextForge Authors.
// SPDX-License-Identifier: Apache-2.0

// Reference kernels: plain loops, one output element at a time.

#include <algorithm>
#include <cstring>
#include <limits>
#include <vector>

#include "textforge/kernels.hpp"

namespace textforge::kernels::serial {

void linear(const float* x, const float* w, const float* bias, float* y, Index M, Index K,
            Index N) {
  for (Index i = 0; i < M; ++i) {
    for (Index j = 0; j < N; ++j) {
      float acc = bias ? bias[j] : 0.0f;
      for (Index k = 0; k < K; ++k) acc += x[i * K + k] * w[k * N + j];
      y[i * N + j] = acc;
    }
  }
}

void matmul_bt_acc(const float* a, const float* b, float* c, Index M, Index K, Index N) {
  for (Index i = 0; i < M; ++i) {
    for (Index j = 0; j < N; ++j) {
      float acc = c[i * N + j];
      for (Index k = 0; k < K; ++k) acc += a[i * K + k] * b[j * K + k];
      c[i * N + j] = acc;
    }
  }
}

void matmul_at_acc(const float* a, const float* b, float* c, Index M, Index K, Index N) {
  for (Index k = 0; k < K; ++k) {
    for (Index n = 0; n < N; ++n) {
      float acc = c[k * N + n];
      for (Index m = 0; m < M; ++m) acc += a[m * K + k] * b[m * N + n];
      c[k * N + n] = acc;
    }
  }
}

void conv1d_maxpool(const float* x, const Index* lengths, Index B, Index T, Index D,
                    const float* filters, Index W, Index F, const float* bias, bool relu,
                    float* out, std::int32_t* argmax) {
  for (Index b = 0; b < B; ++b) {
    const Index len = lengths ? lengths[b] : T;
    const Index pad = conv_pad(len, W);
    const Index windows = len + pad - W + 1;
    for (Index f = 0; f < F; ++f) {
      float best = -std::numeric_limits<float>::infinity();
      Index best_s = 0;
      for (Index s = 0; s < windows; ++s) {
        float acc = 0.0f;
        for (Index o = 0; o < W; ++o) {
          const Index row = s + o - pad;
          if (row < 0) continue;
          for (Index d = 0; d < D; ++d) {
            acc += x[(b * T + row) * D + d] * filters[(o * D + d) * F + f];
          }
        }
        if (s == 0 || acc > best) {
          best = acc;
          best_s = s;
        }
      }
      if (bias) best += bias[f];
      if (relu) best = kernels::relu(best);
      out[b * F + f] = best;
      if (argmax) argmax[b * F + f] = static_cast<std::int32_t>(best_s);
    }
  }
}

void lstm_sequence(const float* x, const Index* lengths, Index B, Index T, Index D, Index H,
                   const float* w_ih, const float* w_hh, const float* bias, bool reverse,
                   float* h_out, float* gates, float* cell) {
  std::vector<float> h(H), c(H), a(4 * H), h_new(H);
  for (Index b = 0; b < B; ++b) {
    const Index len = lengths ? lengths[b] : T;
    std::fill(h.begin(), h.end(), 0.0f);
    std::fill(c.begin(), c.end(), 0.0f);
    for (Index step = 0; step < T; ++step) {
      const Index t = reverse ? T - 1 - step : step;
      float* ho = h_out + (b * T + t) * H;
      if (t >= len) {
        std::copy(h.begin(), h.end(), ho);
        if (gates) std::fill_n(gates + (b * T + t) * 4 * H, 4 * H, 0.0f);
        if (cell) std::copy(c.begin(), c.end(), cell + (b * T + t) * H);
        continue;
      }
      const float* xt = x + (b * T + t) * D;
      for (Index j = 0; j < 4 * H; ++j) {
        float acc = bias[j];
        for (Index k = 0; k < D; ++k) acc += xt[k] * w_ih[k * 4 * H + j];
        for (Index k = 0; k < H; ++k) acc += h[k] * w_hh[k * 4 * H + j];
        a[j] = acc;
      }
      for (Index j = 0; j < H; ++j) {
        const float ig = sigmoid(a[j]);
        const float fg = sigmoid(a[H + j]);
        const float gg = std::tanh(a[2 * H + j]);
        const float og = sigmoid(a[3 * H + j]);
        c[j] = fg * c[j] + ig * gg;
        h_new[j] = og * std::tanh(c[j]);
        if (gates) {
          float* g = gates + (b * T + t) * 4 * H;
          g[j] = ig;
          g[H + j] = fg;
          g[2 * H + j] = gg;
          g[3 * H + j] = og;
        }
      }
      h = h_new;
      std::copy(h.begin(), h.end(), ho);
      if (cell) std::copy(c.begin(), c.end(), cell + (b * T + t) * H);
    }
  }
}

void self_attention(const float* hs, const Index* lengths, Index B, Index T, Index Hd,
                    const float* w1, const float* w2, Index A, float* out, float* alpha,
                    float* u) {
  std::vector<float> scores(T), uu(A), al(T);
  for (Index b = 0; b < B; ++b) {
    const Index len = lengths ? lengths[b] : T;
    for (Index t = 0; t < len; ++t) {
      const float* ht = hs + (b * T + t) * Hd;
      for (Index a = 0; a < A; ++a) {
        float acc = 0.0f;
        for (Index k = 0; k < Hd; ++k) acc += ht[k] * w1[k * A + a];
        uu[a] = std::tanh(acc);
        if (u) u[(b * T + t) * A + a] = uu[a];
      }
      float s = 0.0f;
      for (Index a = 0; a < A; ++a) s += w2[a] * uu[a];
      scores[t] = s;
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
      if (alpha) alpha[b * T + t] = v;
      al[t] = v;
      if (u && t >= len) std::fill_n(u + (b * T + t) * A, A, 0.0f);
    }
    for (Index j = 0; j < Hd; ++j) {
      float acc = 0.0f;
      for (Index t = 0; t < len; ++t) acc += al[t] * hs[(b * T + t) * Hd + j];
      out[b * Hd + j] = acc;
    }
  }
}

void softmax_rows(const float* x, float* y, Index M, Index N) {
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
  for (Index i = 0; i < n; ++i) {
    std::memcpy(out + i * D, table + static_cast<Index>(ids[i]) * D,
                static_cast<std::size_t>(D) * sizeof(float));
  }
}

}  // namespace textforge::kernels::serial
