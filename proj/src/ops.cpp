// Copyright 2026 The TextForge Authors.
// SPDX-License-Identifier: Apache-2.0

#include "textforge/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "textforge/error.hpp"
#include "textforge/kernels.hpp"

namespace textforge::ops {
namespace {

using detail::TensorImpl;
using Impl = std::shared_ptr<TensorImpl>;
using kernels::Index;

[[noreturn]] void shape_error(const std::string& what) {
  throw Error(ErrorCode::ShapeMismatch, what);
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) {
    shape_error(std::string(op) + ": " + shape_str(a.shape()) + " vs " + shape_str(b.shape()));
  }
}

bool wants_grad(const Impl& t) { return t && t->requires_grad; }

const Index* lengths_ptr(Lengths lengths, Index batch, const char* op) {
  if (lengths.empty()) return nullptr;
  if (static_cast<Index>(lengths.size()) != batch) {
    shape_error(std::string(op) + ": lengths size " + std::to_string(lengths.size()) +
                " != batch " + std::to_string(batch));
  }
  return lengths.data();
}

template <typename Fwd, typename Bwd>
Tensor unary(const Tensor& x, Fwd fwd, Bwd bwd) {
  std::vector<float> y(x.values().size());
  const auto& xv = x.values();
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = fwd(xv[i]);
  Impl xi = x.impl_ptr();
  return make_op_result(x.shape(), std::move(y), {x}, [xi, bwd](TensorImpl& out) {
    auto g = xi->grad_buffer();
    for (std::size_t i = 0; i < g.size(); ++i) {
      g[i] += out.grad[i] * bwd(xi->data[i], out.data[i]);
    }
  });
}

}  // namespace

Tensor linear(const Tensor& x, const Tensor& w, const Tensor& bias) {
  if (w.rank() != 2 || x.rank() < 1) shape_error("linear: weight must be rank 2");
  const Index K = w.dim(0);
  const Index N = w.dim(1);
  if (x.dim(-1) != K) {
    shape_error("linear: input " + shape_str(x.shape()) + " vs weight " + shape_str(w.shape()));
  }
  if (bias.defined() && (bias.rank() != 1 || bias.dim(0) != N)) {
    shape_error("linear: bias " + shape_str(bias.shape()) + " for " + std::to_string(N) +
                " outputs");
  }
  const Index M = x.numel() / K;
  std::vector<float> y(static_cast<std::size_t>(M * N));
  kernels::linear(x.data().data(), w.data().data(), bias.defined() ? bias.data().data() : nullptr,
                  y.data(), M, K, N);
  Shape out_shape = x.shape();
  out_shape.back() = N;
  Impl xi = x.impl_ptr(), wi = w.impl_ptr(), bi = bias.defined() ? bias.impl_ptr() : nullptr;
  std::vector<Tensor> inputs{x, w};
  if (bias.defined()) inputs.push_back(bias);
  return make_op_result(std::move(out_shape), std::move(y), std::move(inputs),
                        [xi, wi, bi, M, K, N](TensorImpl& out) {
                          const float* dy = out.grad.data();
                          if (wants_grad(xi)) {
                            kernels::matmul_bt_acc(dy, wi->data.data(), xi->grad_buffer().data(),
                                                   M, N, K);
                          }
                          if (wants_grad(wi)) {
                            kernels::matmul_at_acc(xi->data.data(), dy, wi->grad_buffer().data(),
                                                   M, K, N);
                          }
                          if (wants_grad(bi)) {
                            auto gb = bi->grad_buffer();
                            for (Index i = 0; i < M; ++i) {
                              for (Index j = 0; j < N; ++j) gb[j] += dy[i * N + j];
                            }
                          }
                        });
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2) shape_error("matmul: operands must be rank 2");
  if (a.dim(1) != b.dim(0)) {
    shape_error("matmul: " + shape_str(a.shape()) + " x " + shape_str(b.shape()));
  }
  return linear(a, b, Tensor{});
}

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "add");
  std::vector<float> y(a.values());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += b.values()[i];
  Impl ai = a.impl_ptr(), bi = b.impl_ptr();
  return make_op_result(a.shape(), std::move(y), {a, b}, [ai, bi](TensorImpl& out) {
    if (wants_grad(ai)) ai->accumulate(out.grad);
    if (wants_grad(bi)) bi->accumulate(out.grad);
  });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "sub");
  std::vector<float> y(a.values());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] -= b.values()[i];
  Impl ai = a.impl_ptr(), bi = b.impl_ptr();
  return make_op_result(a.shape(), std::move(y), {a, b}, [ai, bi](TensorImpl& out) {
    if (wants_grad(ai)) ai->accumulate(out.grad);
    if (wants_grad(bi)) {
      auto g = bi->grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] -= out.grad[i];
    }
  });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "mul");
  std::vector<float> y(a.values());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] *= b.values()[i];
  Impl ai = a.impl_ptr(), bi = b.impl_ptr();
  return make_op_result(a.shape(), std::move(y), {a, b}, [ai, bi](TensorImpl& out) {
    if (wants_grad(ai)) {
      auto g = ai->grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += out.grad[i] * bi->data[i];
    }
    if (wants_grad(bi)) {
      auto g = bi->grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += out.grad[i] * ai->data[i];
    }
  });
}

Tensor add_bias(const Tensor& x, const Tensor& bias) {
  if (bias.rank() != 1 || x.rank() < 1 || x.dim(-1) != bias.dim(0)) {
    shape_error("add_bias: " + shape_str(x.shape()) + " + " + shape_str(bias.shape()));
  }
  const Index N = bias.dim(0);
  const Index M = x.numel() / std::max<Index>(N, 1);
  std::vector<float> y(x.values());
  for (Index i = 0; i < M; ++i) {
    for (Index j = 0; j < N; ++j) y[i * N + j] += bias.values()[j];
  }
  Impl xi = x.impl_ptr(), bi = bias.impl_ptr();
  return make_op_result(x.shape(), std::move(y), {x, bias}, [xi, bi, M, N](TensorImpl& out) {
    if (wants_grad(xi)) xi->accumulate(out.grad);
    if (wants_grad(bi)) {
      auto g = bi->grad_buffer();
      for (Index i = 0; i < M; ++i) {
        for (Index j = 0; j < N; ++j) g[j] += out.grad[i * N + j];
      }
    }
  });
}

Tensor scale(const Tensor& x, float s) {
  return unary(
      x, [s](float v) { return s * v; }, [s](float, float) { return s; });
}

Tensor tanh(const Tensor& x) {
  return unary(
      x, [](float v) { return std::tanh(v); }, [](float, float y) { return 1.0f - y * y; });
}

Tensor sigmoid(const Tensor& x) {
  return unary(
      x, [](float v) { return kernels::sigmoid(v); },
      [](float, float y) { return y * (1.0f - y); });
}

Tensor relu(const Tensor& x) {
  if (decisions::active()) {
    std::uint64_t i = 0;
    for (float v : x.values()) decisions::mix((i++ << 1) | (v > 0.0f ? 1u : 0u));
  }
  return unary(
      x, [](float v) { return kernels::relu(v); },
      [](float xv, float) { return xv > 0.0f ? 1.0f : 0.0f; });
}

Tensor sum(const Tensor& x) {
  float acc = 0.0f;
  for (float v : x.values()) acc += v;
  Impl xi = x.impl_ptr();
  return make_op_result({}, {acc}, {x}, [xi](TensorImpl& out) {
    if (!wants_grad(xi)) return;
    const float g = out.grad[0];
    for (auto& v : xi->grad_buffer()) v += g;
  });
}

Tensor elementwise(Elementwise op, const Tensor& a, const Tensor& b) {
  switch (op) {
    case Elementwise::Add: return add(a, b);
    case Elementwise::Mul: return mul(a, b);
    case Elementwise::Tanh: return tanh(a);
    case Elementwise::Sigmoid: return sigmoid(a);
    case Elementwise::Relu: return relu(a);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown elementwise op");
}

Tensor concat(std::span<const Tensor> parts) {
  if (parts.empty()) shape_error("concat: no inputs");
  const Shape& first = parts[0].shape();
  if (first.empty()) shape_error("concat: scalar input");
  Index total = 0;
  std::vector<Index> widths;
  for (const auto& p : parts) {
    const Shape& s = p.shape();
    if (s.size() != first.size() || !std::equal(s.begin(), s.end() - 1, first.begin())) {
      shape_error("concat: " + shape_str(first) + " vs " + shape_str(s));
    }
    widths.push_back(s.back());
    total += s.back();
  }
  const Index rows = parts[0].numel() / std::max<Index>(first.back(), 1);
  std::vector<float> y(static_cast<std::size_t>(rows * total));
  Index off = 0;
  for (std::size_t p = 0; p < parts.size(); ++p) {
    const auto& v = parts[p].values();
    const Index w = widths[p];
    for (Index r = 0; r < rows; ++r) {
      std::copy_n(v.data() + r * w, w, y.data() + r * total + off);
    }
    off += w;
  }
  Shape out_shape = first;
  out_shape.back() = total;
  std::vector<Impl> impls;
  for (const auto& p : parts) impls.push_back(p.impl_ptr());
  return make_op_result(std::move(out_shape), std::move(y),
                        std::vector<Tensor>(parts.begin(), parts.end()),
                        [impls, widths, rows, total](TensorImpl& out) {
                          Index off = 0;
                          for (std::size_t p = 0; p < impls.size(); ++p) {
                            const Index w = widths[p];
                            if (wants_grad(impls[p])) {
                              auto g = impls[p]->grad_buffer();
                              for (Index r = 0; r < rows; ++r) {
                                for (Index j = 0; j < w; ++j) {
                                  g[r * w + j] += out.grad[r * total + off + j];
                                }
                              }
                            }
                            off += w;
                          }
                        });
}

Tensor reshape(const Tensor& x, Shape shape) {
  if (shape_numel(shape) != x.numel()) {
    shape_error("reshape: " + shape_str(x.shape()) + " -> " + shape_str(shape));
  }
  Impl xi = x.impl_ptr();
  return make_op_result(std::move(shape), x.values(), {x}, [xi](TensorImpl& out) {
    if (wants_grad(xi)) xi->accumulate(out.grad);
  });
}

Tensor embedding_lookup(const Tensor& table, const IdTensor& ids) {
  if (table.rank() != 2) shape_error("embedding_lookup: table must be rank 2");
  const Index V = table.dim(0);
  const Index D = table.dim(1);
  for (auto id : ids.data) {
    if (id < 0 || id >= V) {
      throw Error(ErrorCode::IdOutOfRange,
                  "id " + std::to_string(id) + " outside [0," + std::to_string(V) + ")");
    }
  }
  const Index n = static_cast<Index>(ids.data.size());
  std::vector<float> y(static_cast<std::size_t>(n * D));
  kernels::embedding_gather(table.data().data(), D, ids.data.data(), n, y.data());
  Shape out_shape = ids.shape;
  out_shape.push_back(D);
  Impl ti = table.impl_ptr();
  return make_op_result(std::move(out_shape), std::move(y), {table},
                        [ti, ids = ids.data, D](TensorImpl& out) {
                          if (!wants_grad(ti)) return;
                          auto g = ti->grad_buffer();
                          for (std::size_t i = 0; i < ids.size(); ++i) {
                            float* row = g.data() + static_cast<Index>(ids[i]) * D;
                            const float* src = out.grad.data() + static_cast<Index>(i) * D;
                            for (Index d = 0; d < D; ++d) row[d] += src[d];
                          }
                        });
}

Tensor conv1d_maxpool(const Tensor& x, const Tensor& filters, Lengths lengths, const Tensor& bias,
                      bool relu) {
  if (x.rank() != 3 || filters.rank() != 3) {
    shape_error("conv1d_maxpool: expected x[b,t,d] and filters[w,d,f]");
  }
  const Index B = x.dim(0), T = x.dim(1), D = x.dim(2);
  const Index W = filters.dim(0), F = filters.dim(2);
  if (filters.dim(1) != D) {
    shape_error("conv1d_maxpool: x " + shape_str(x.shape()) + " vs filters " +
                shape_str(filters.shape()));
  }
  if (bias.defined() && (bias.rank() != 1 || bias.dim(0) != F)) {
    shape_error("conv1d_maxpool: bias " + shape_str(bias.shape()));
  }
  const Index* lp = lengths_ptr(lengths, B, "conv1d_maxpool");
  for (Index b = 0; b < B; ++b) {
    const Index len = lp ? lp[b] : T;
    if (len < 1 || len > T) {
      throw Error(ErrorCode::EmptySequence,
                  "conv1d_maxpool: row " + std::to_string(b) + " has no valid positions");
    }
  }
  std::vector<float> y(static_cast<std::size_t>(B * F));
  std::vector<std::int32_t> argmax(static_cast<std::size_t>(B * F));
  kernels::conv1d_maxpool(x.data().data(), lp, B, T, D, filters.data().data(), W, F,
                          bias.defined() ? bias.data().data() : nullptr, relu, y.data(),
                          argmax.data());
  if (decisions::active()) {
    for (std::size_t i = 0; i < argmax.size(); ++i) {
      decisions::mix((static_cast<std::uint64_t>(argmax[i]) << 1) | (y[i] > 0.0f ? 1u : 0u));
    }
  }
  std::vector<Index> lens(static_cast<std::size_t>(B));
  for (Index b = 0; b < B; ++b) lens[b] = lp ? lp[b] : T;
  Impl xi = x.impl_ptr(), fi = filters.impl_ptr(), bi = bias.defined() ? bias.impl_ptr() : nullptr;
  std::vector<Tensor> inputs{x, filters};
  if (bias.defined()) inputs.push_back(bias);
  return make_op_result(
      {B, F}, std::move(y), std::move(inputs),
      [xi, fi, bi, argmax = std::move(argmax), lens = std::move(lens), relu, B, T, D, W,
       F](TensorImpl& out) {
        const bool gx = wants_grad(xi), gf = wants_grad(fi), gb = wants_grad(bi);
        float* dx = gx ? xi->grad_buffer().data() : nullptr;
        float* dfilt = gf ? fi->grad_buffer().data() : nullptr;
        float* dbias = gb ? bi->grad_buffer().data() : nullptr;
        const float* xv = xi->data.data();
        const float* fv = fi->data.data();
        for (Index b = 0; b < B; ++b) {
          const Index pad = kernels::conv_pad(lens[b], W);
          for (Index f = 0; f < F; ++f) {
            float g = out.grad[b * F + f];
            if (relu && !(out.data[b * F + f] > 0.0f)) g = 0.0f;
            if (g == 0.0f) continue;
            if (dbias) dbias[f] += g;
            const Index s = argmax[b * F + f];
            for (Index o = 0; o < W; ++o) {
              const Index row = s + o - pad;
              if (row < 0) continue;
              for (Index d = 0; d < D; ++d) {
                const Index xi_idx = (b * T + row) * D + d;
                const Index fi_idx = (o * D + d) * F + f;
                if (dx) dx[xi_idx] += g * fv[fi_idx];
                if (dfilt) dfilt[fi_idx] += g * xv[xi_idx];
              }
            }
          }
        }
      });
}

Tensor lstm(const Tensor& x, const Tensor& w_ih, const Tensor& w_hh, const Tensor& bias,
            Lengths lengths, bool reverse) {
  if (x.rank() != 3 || w_ih.rank() != 2 || w_hh.rank() != 2 || bias.rank() != 1) {
    shape_error("lstm: expected x[b,t,d], w_ih[d,4h], w_hh[h,4h], bias[4h]");
  }
  const Index B = x.dim(0), T = x.dim(1), D = x.dim(2);
  const Index H = w_hh.dim(0);
  if (w_ih.dim(0) != D || w_ih.dim(1) != 4 * H || w_hh.dim(1) != 4 * H || bias.dim(0) != 4 * H) {
    shape_error("lstm: x " + shape_str(x.shape()) + ", w_ih " + shape_str(w_ih.shape()) +
                ", w_hh " + shape_str(w_hh.shape()) + ", bias " + shape_str(bias.shape()));
  }
  const Index* lp = lengths_ptr(lengths, B, "lstm");
  std::vector<float> h(static_cast<std::size_t>(B * T * H));
  const bool taping = grad_mode_enabled() &&
                      (x.requires_grad() || w_ih.requires_grad() || w_hh.requires_grad() ||
                       bias.requires_grad());
  std::vector<float> gates, cell;
  if (taping) {
    gates.resize(static_cast<std::size_t>(B * T * 4 * H));
    cell.resize(static_cast<std::size_t>(B * T * H));
  }
  kernels::lstm_sequence(x.data().data(), lp, B, T, D, H, w_ih.data().data(), w_hh.data().data(),
                         bias.data().data(), reverse, h.data(), taping ? gates.data() : nullptr,
                         taping ? cell.data() : nullptr);
  std::vector<Index> lens(static_cast<std::size_t>(B));
  for (Index b = 0; b < B; ++b) lens[b] = std::min(lp ? lp[b] : T, T);
  Impl xi = x.impl_ptr(), wi = w_ih.impl_ptr(), ui = w_hh.impl_ptr(), bi = bias.impl_ptr();
  return make_op_result(
      {B, T, H}, std::move(h), {x, w_ih, w_hh, bias},
      [xi, wi, ui, bi, gates = std::move(gates), cell = std::move(cell), lens = std::move(lens),
       reverse, B, T, D, H](TensorImpl& out) {
        const Index G = 4 * H;
        float* dx = wants_grad(xi) ? xi->grad_buffer().data() : nullptr;
        float* dwih = wants_grad(wi) ? wi->grad_buffer().data() : nullptr;
        float* dwhh = wants_grad(ui) ? ui->grad_buffer().data() : nullptr;
        float* db = wants_grad(bi) ? bi->grad_buffer().data() : nullptr;
        const float* xv = xi->data.data();
        const float* wih = wi->data.data();
        const float* whh = ui->data.data();
        const float* hv = out.data.data();
        const float* dy = out.grad.data();
        std::vector<float> dh(H), dc(H), da(G), dh_prev(H);
        const std::vector<float> zeros(static_cast<std::size_t>(H), 0.0f);
        for (Index b = 0; b < B; ++b) {
          std::fill(dh.begin(), dh.end(), 0.0f);
          std::fill(dc.begin(), dc.end(), 0.0f);
          for (Index step = T - 1; step >= 0; --step) {
            const Index t = reverse ? T - 1 - step : step;
            const Index prev = reverse ? t + 1 : t - 1;
            const bool has_prev = prev >= 0 && prev < T;
            for (Index j = 0; j < H; ++j) dh[j] += dy[(b * T + t) * H + j];
            if (t >= lens[b]) continue;  // state copy: gradients pass through unchanged
            const float* g = gates.data() + (b * T + t) * G;
            const float* c = cell.data() + (b * T + t) * H;
            const float* c_prev = has_prev ? cell.data() + (b * T + prev) * H : zeros.data();
            const float* h_prev = has_prev ? hv + (b * T + prev) * H : zeros.data();
            for (Index j = 0; j < H; ++j) {
              const float ig = g[j], fg = g[H + j], gg = g[2 * H + j], og = g[3 * H + j];
              const float tc = std::tanh(c[j]);
              const float d_o = dh[j] * tc;
              const float dcj = dc[j] + dh[j] * og * (1.0f - tc * tc);
              da[j] = dcj * gg * ig * (1.0f - ig);
              da[H + j] = dcj * c_prev[j] * fg * (1.0f - fg);
              da[2 * H + j] = dcj * ig * (1.0f - gg * gg);
              da[3 * H + j] = d_o * og * (1.0f - og);
              dc[j] = dcj * fg;
            }
            if (db) {
              for (Index j = 0; j < G; ++j) db[j] += da[j];
            }
            const float* xt = xv + (b * T + t) * D;
            if (dwih) {
              for (Index k = 0; k < D; ++k) {
                for (Index j = 0; j < G; ++j) dwih[k * G + j] += xt[k] * da[j];
              }
            }
            if (dwhh) {
              for (Index k = 0; k < H; ++k) {
                for (Index j = 0; j < G; ++j) dwhh[k * G + j] += h_prev[k] * da[j];
              }
            }
            if (dx) {
              float* dxt = dx + (b * T + t) * D;
              for (Index k = 0; k < D; ++k) {
                float acc = 0.0f;
                for (Index j = 0; j < G; ++j) acc += da[j] * wih[k * G + j];
                dxt[k] += acc;
              }
            }
            for (Index k = 0; k < H; ++k) {
              float acc = 0.0f;
              for (Index j = 0; j < G; ++j) acc += da[j] * whh[k * G + j];
              dh_prev[k] = acc;
            }
            dh = dh_prev;
          }
        }
      });
}

Tensor self_attention(const Tensor& hs, const Tensor& w1, const Tensor& w2, Lengths lengths) {
  if (hs.rank() != 3 || w1.rank() != 2 || w2.rank() != 1) {
    shape_error("self_attention: expected H[b,t,h], w1[h,a], w2[a]");
  }
  const Index B = hs.dim(0), T = hs.dim(1), Hd = hs.dim(2);
  const Index A = w1.dim(1);
  if (w1.dim(0) != Hd || w2.dim(0) != A) {
    shape_error("self_attention: H " + shape_str(hs.shape()) + ", w1 " + shape_str(w1.shape()) +
                ", w2 " + shape_str(w2.shape()));
  }
  const Index* lp = lengths_ptr(lengths, B, "self_attention");
  for (Index b = 0; b < B; ++b) {
    const Index len = lp ? lp[b] : T;
    if (len < 1 || len > T) {
      throw Error(ErrorCode::EmptySequence,
                  "self_attention: row " + std::to_string(b) + " has no valid positions");
    }
  }
  std::vector<float> y(static_cast<std::size_t>(B * Hd));
  std::vector<float> alpha(static_cast<std::size_t>(B * T));
  std::vector<float> u(static_cast<std::size_t>(B * T * A));
  kernels::self_attention(hs.data().data(), lp, B, T, Hd, w1.data().data(), w2.data().data(), A,
                          y.data(), alpha.data(), u.data());
  std::vector<Index> lens(static_cast<std::size_t>(B));
  for (Index b = 0; b < B; ++b) lens[b] = lp ? lp[b] : T;
  Impl hi = hs.impl_ptr(), w1i = w1.impl_ptr(), w2i = w2.impl_ptr();
  return make_op_result(
      {B, Hd}, std::move(y), {hs, w1, w2},
      [hi, w1i, w2i, alpha = std::move(alpha), u = std::move(u), lens = std::move(lens), B, T,
       Hd, A](TensorImpl& out) {
        float* dh = wants_grad(hi) ? hi->grad_buffer().data() : nullptr;
        float* dw1 = wants_grad(w1i) ? w1i->grad_buffer().data() : nullptr;
        float* dw2 = wants_grad(w2i) ? w2i->grad_buffer().data() : nullptr;
        const float* hv = hi->data.data();
        const float* w1v = w1i->data.data();
        const float* w2v = w2i->data.data();
        std::vector<float> dalpha(T), dz(A);
        for (Index b = 0; b < B; ++b) {
          const float* dout = out.grad.data() + b * Hd;
          const Index len = lens[b];
          float weighted = 0.0f;
          for (Index t = 0; t < len; ++t) {
            const float* ht = hv + (b * T + t) * Hd;
            float acc = 0.0f;
            for (Index j = 0; j < Hd; ++j) acc += dout[j] * ht[j];
            dalpha[t] = acc;
            weighted += alpha[b * T + t] * acc;
          }
          for (Index t = 0; t < len; ++t) {
            const float at = alpha[b * T + t];
            const float ds = at * (dalpha[t] - weighted);
            const float* ut = u.data() + (b * T + t) * A;
            const float* ht = hv + (b * T + t) * Hd;
            for (Index a = 0; a < A; ++a) {
              if (dw2) dw2[a] += ds * ut[a];
              dz[a] = ds * w2v[a] * (1.0f - ut[a] * ut[a]);
            }
            if (dw1) {
              for (Index k = 0; k < Hd; ++k) {
                for (Index a = 0; a < A; ++a) dw1[k * A + a] += ht[k] * dz[a];
              }
            }
            if (dh) {
              float* dht = dh + (b * T + t) * Hd;
              for (Index k = 0; k < Hd; ++k) {
                float acc = at * dout[k];
                for (Index a = 0; a < A; ++a) acc += dz[a] * w1v[k * A + a];
                dht[k] += acc;
              }
            }
          }
        }
      });
}

Tensor softmax_cross_entropy(const Tensor& logits, std::span<const std::int32_t> targets,
                             std::span<const std::uint8_t> mask) {
  if (logits.rank() != 2) shape_error("softmax_cross_entropy: logits must be [n,c]");
  const Index N = logits.dim(0), C = logits.dim(1);
  if (static_cast<Index>(targets.size()) != N || (!mask.empty() && static_cast<Index>(mask.size()) != N)) {
    shape_error("softmax_cross_entropy: targets/mask length vs " + shape_str(logits.shape()));
  }
  std::vector<std::uint8_t> active(static_cast<std::size_t>(N), 1);
  Index count = 0;
  for (Index i = 0; i < N; ++i) {
    if (!mask.empty() && mask[i] == 0) {
      active[i] = 0;
      continue;
    }
    if (targets[i] < 0 || targets[i] >= C) {
      throw Error(ErrorCode::TargetOutOfRange,
                  "target " + std::to_string(targets[i]) + " outside [0," + std::to_string(C) + ")");
    }
    ++count;
  }
  if (count == 0) throw Error(ErrorCode::EmptyLoss, "every row is masked");

  const float* x = logits.data().data();
  std::vector<float> probs(static_cast<std::size_t>(N * C), 0.0f);
  float total = 0.0f;
  for (Index i = 0; i < N; ++i) {
    if (!active[i]) continue;
    const float* xi = x + i * C;
    float m = -std::numeric_limits<float>::infinity();
    for (Index j = 0; j < C; ++j) m = std::max(m, xi[j]);
    float z = 0.0f;
    for (Index j = 0; j < C; ++j) z += std::exp(xi[j] - m);
    const float lse = m + std::log(z);
    total += lse - xi[targets[i]];
    for (Index j = 0; j < C; ++j) probs[i * C + j] = std::exp(xi[j] - lse);
  }
  const float inv = 1.0f / static_cast<float>(count);
  Impl li = logits.impl_ptr();
  std::vector<std::int32_t> tgt(targets.begin(), targets.end());
  return make_op_result(
      {}, {total * inv}, {logits},
      [li, probs = std::move(probs), tgt = std::move(tgt), active = std::move(active), inv, N,
       C](TensorImpl& out) {
        if (!wants_grad(li)) return;
        auto g = li->grad_buffer();
        const float scale = out.grad[0] * inv;
        for (Index i = 0; i < N; ++i) {
          if (!active[i]) continue;
          for (Index j = 0; j < C; ++j) {
            const float onehot = j == tgt[i] ? 1.0f : 0.0f;
            g[i * C + j] += scale * (probs[i * C + j] - onehot);
          }
        }
      });
}

Tensor softmax(const Tensor& logits) {
  const Index C = logits.dim(-1);
  const Index M = logits.numel() / std::max<Index>(C, 1);
  std::vector<float> y(logits.values().size());
  kernels::softmax_rows(logits.data().data(), y.data(), M, C);
  return Tensor::from(logits.shape(), std::move(y));
}

}  // namespace textforge::ops
