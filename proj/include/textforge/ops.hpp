// Copyright 2026 The TextForge Authors.
// SPDX-License-Identifier: Apache-2.0

// Differentiable operations. Each call records a tape node when any input
// requires grad; gradients follow the standard adjoints.

#pragma once

#include <cstdint>
#include <span>

#include "textforge/tensor.hpp"

namespace textforge::ops {

using Lengths = std::span<const std::int64_t>;

Tensor matmul(const Tensor& a, const Tensor& b);

/// y[..., n] = x[..., k] w[k, n] + bias[n]. `bias` may be undefined.
Tensor linear(const Tensor& x, const Tensor& w, const Tensor& bias);

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor add_bias(const Tensor& x, const Tensor& bias);
Tensor scale(const Tensor& x, float s);
Tensor tanh(const Tensor& x);
Tensor sigmoid(const Tensor& x);
Tensor relu(const Tensor& x);
Tensor sum(const Tensor& x);

enum class Elementwise { Add, Mul, Tanh, Sigmoid, Relu };
/// Dispatcher over the pointwise ops; `b` is ignored for unary kinds.
Tensor elementwise(Elementwise op, const Tensor& a, const Tensor& b = {});

/// Concatenation along the last axis.
Tensor concat(std::span<const Tensor> parts);
Tensor reshape(const Tensor& x, Shape shape);

/// table[V, d], ids[...] -> [..., d]. Gradient scatter-adds into table rows.
Tensor embedding_lookup(const Tensor& table, const IdTensor& ids);

/// x[b, t, d], filters[w, d, f] -> [b, f]: max over valid windows, then the
/// optional bias and relu. Sequences shorter than w are left-padded with
/// zeros up to w. `lengths` empty means every position is valid.
Tensor conv1d_maxpool(const Tensor& x, const Tensor& filters, Lengths lengths,
                      const Tensor& bias = {}, bool relu = false);

/// One LSTM direction. x[b, t, d]; w_ih[d, 4h], w_hh[h, 4h], bias[4h], gate
/// order (i, f, g, o). Returns hidden states [b, t, h]; masked steps copy the
/// previous state.
Tensor lstm(const Tensor& x, const Tensor& w_ih, const Tensor& w_hh, const Tensor& bias,
            Lengths lengths, bool reverse);

/// H[b, t, h], w1[h, a], w2[a] -> [b, h]; softmax attention over valid steps.
Tensor self_attention(const Tensor& hs, const Tensor& w1, const Tensor& w2, Lengths lengths);

/// Mean over unmasked rows of -log softmax(logits)[target]. `mask` empty
/// means every row counts.
Tensor softmax_cross_entropy(const Tensor& logits, std::span<const std::int32_t> targets,
                             std::span<const std::uint8_t> mask = {});

/// Row softmax over the last axis (values only, never taped).
Tensor softmax(const Tensor& logits);

}  // namespace textforge::ops
