// Copyright 2026 The TextForge Authors.
// SPDX-License-Identifier: Apache-2.0

// Finite-difference sweep over every differentiable op and the two reference
// document models. Used by the unit tests and by the acceptance binary.

#pragma once

#include <algorithm>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "textforge/gradcheck.hpp"
#include "textforge/modules.hpp"
#include "textforge/ops.hpp"
#include "toy_fixture.hpp"

namespace tf_test {

struct GradcheckCase {
  std::string name;
  int instances = 0;
  double max_rel_error = 0.0;
  std::size_t checked = 0;
  std::size_t skipped_kinks = 0;
};

namespace gc_detail {

using textforge::Rng;
using textforge::Shape;
using textforge::Tensor;
namespace ops = textforge::ops;

inline std::int64_t pick(Rng& rng, std::int64_t lo, std::int64_t hi) {
  return lo + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(hi - lo + 1)));
}

inline Tensor rand_t(Rng& rng, Shape s, float scale = 1.0f) {
  std::vector<float> v(static_cast<std::size_t>(textforge::shape_numel(s)));
  rng.fill_uniform(v, -scale, scale);
  return Tensor::from(std::move(s), std::move(v));
}

// Projects an op output onto fixed random weights so every component matters.
inline Tensor project(const Tensor& y, const Tensor& r) { return ops::sum(ops::mul(y, r)); }

inline void check(GradcheckCase& c, const textforge::ScalarFn& f, const Tensor& x, float eps) {
  const auto rep = textforge::finite_diff_check_smooth(f, x, eps);
  c.max_rel_error = std::max(c.max_rel_error, rep.max_rel_error);
  c.checked += rep.checked;
  c.skipped_kinks += rep.skipped_kinks;
}

inline std::vector<std::int64_t> random_lengths(Rng& rng, std::int64_t B, std::int64_t T) {
  std::vector<std::int64_t> l(static_cast<std::size_t>(B));
  for (auto& v : l) v = pick(rng, 1, T);
  l[0] = T;
  return l;
}

}  // namespace gc_detail

inline std::vector<GradcheckCase> run_gradcheck_suite(int instances, const std::filesystem::path& toy_dir,
                                                      float eps = 1e-3f) {
  using namespace gc_detail;
  using textforge::IdTensor;
  std::vector<GradcheckCase> out;
  auto run = [&](const std::string& name, const std::function<void(Rng&, GradcheckCase&)>& body) {
    GradcheckCase c;
    c.name = name;
    for (int i = 0; i < instances; ++i) {
      Rng rng = Rng::derive(20260101, static_cast<std::uint64_t>(out.size() * 1000 + i));
      body(rng, c);
      ++c.instances;
    }
    out.push_back(c);
  };

  run("matmul", [&](Rng& rng, GradcheckCase& c) {
    const auto M = pick(rng, 1, 4), K = pick(rng, 1, 5), N = pick(rng, 1, 4);
    Tensor a = rand_t(rng, {M, K}), b = rand_t(rng, {K, N}), r = rand_t(rng, {M, N});
    check(c, [&](const Tensor& x) { return project(ops::matmul(x, b), r); }, a, eps);
    check(c, [&](const Tensor& x) { return project(ops::matmul(a, x), r); }, b, eps);
  });

  run("elementwise", [&](Rng& rng, GradcheckCase& c) {
    const Shape s = {pick(rng, 1, 3), pick(rng, 1, 5)};
    Tensor a = rand_t(rng, s, 2.0f), b = rand_t(rng, s, 2.0f), r = rand_t(rng, s);
    using E = ops::Elementwise;
    for (E op : {E::Add, E::Mul}) {
      check(c, [&](const Tensor& x) { return project(ops::elementwise(op, x, b), r); }, a, eps);
      check(c, [&](const Tensor& x) { return project(ops::elementwise(op, a, x), r); }, b, eps);
    }
    for (E op : {E::Tanh, E::Sigmoid, E::Relu}) {
      check(c, [&](const Tensor& x) { return project(ops::elementwise(op, x), r); }, a, eps);
    }
  });

  run("embedding_lookup", [&](Rng& rng, GradcheckCase& c) {
    const auto V = pick(rng, 2, 6), D = pick(rng, 1, 4), B = pick(rng, 1, 3), T = pick(rng, 1, 5);
    IdTensor ids = IdTensor::zeros({B, T});
    for (auto& id : ids.data) id = static_cast<std::int32_t>(rng.below(static_cast<std::uint64_t>(V)));
    Tensor table = rand_t(rng, {V, D}), r = rand_t(rng, {B, T, D});
    check(c, [&](const Tensor& x) { return project(ops::embedding_lookup(x, ids), r); }, table, eps);
  });

  run("conv1d_maxpool", [&](Rng& rng, GradcheckCase& c) {
    const auto B = pick(rng, 1, 3), T = pick(rng, 1, 6), D = pick(rng, 1, 3), W = pick(rng, 1, 3),
               F = pick(rng, 1, 3);
    const bool relu = rng.below(2) == 1;
    const auto lens = random_lengths(rng, B, T);
    Tensor in = rand_t(rng, {B, T, D}), f = rand_t(rng, {W, D, F}), bias = rand_t(rng, {F}),
           r = rand_t(rng, {B, F});
    check(c, [&](const Tensor& x) { return project(ops::conv1d_maxpool(x, f, lens, bias, relu), r); }, in, eps);
    check(c, [&](const Tensor& x) { return project(ops::conv1d_maxpool(in, x, lens, bias, relu), r); }, f, eps);
    check(c, [&](const Tensor& x) { return project(ops::conv1d_maxpool(in, f, lens, x, relu), r); }, bias, eps);
  });

  run("lstm_seq", [&](Rng& rng, GradcheckCase& c) {
    const auto B = pick(rng, 1, 3), T = pick(rng, 1, 4), D = pick(rng, 1, 3), H = pick(rng, 1, 3);
    const bool rev = rng.below(2) == 1;
    const auto lens = random_lengths(rng, B, T);
    Tensor in = rand_t(rng, {B, T, D}), wi = rand_t(rng, {D, 4 * H}, 0.7f), wh = rand_t(rng, {H, 4 * H}, 0.7f),
           b = rand_t(rng, {4 * H}, 0.5f), r = rand_t(rng, {B, T, H});
    check(c, [&](const Tensor& x) { return project(ops::lstm(x, wi, wh, b, lens, rev), r); }, in, eps);
    check(c, [&](const Tensor& x) { return project(ops::lstm(in, x, wh, b, lens, rev), r); }, wi, eps);
    check(c, [&](const Tensor& x) { return project(ops::lstm(in, wi, x, b, lens, rev), r); }, wh, eps);
    check(c, [&](const Tensor& x) { return project(ops::lstm(in, wi, wh, x, lens, rev), r); }, b, eps);
  });

  run("self_attention", [&](Rng& rng, GradcheckCase& c) {
    const auto B = pick(rng, 1, 3), T = pick(rng, 1, 5), Hd = pick(rng, 1, 4), A = pick(rng, 1, 3);
    const auto lens = random_lengths(rng, B, T);
    Tensor hs = rand_t(rng, {B, T, Hd}), w1 = rand_t(rng, {Hd, A}), w2 = rand_t(rng, {A}), r = rand_t(rng, {B, Hd});
    check(c, [&](const Tensor& x) { return project(ops::self_attention(x, w1, w2, lens), r); }, hs, eps);
    check(c, [&](const Tensor& x) { return project(ops::self_attention(hs, x, w2, lens), r); }, w1, eps);
    check(c, [&](const Tensor& x) { return project(ops::self_attention(hs, w1, x, lens), r); }, w2, eps);
  });

  run("softmax_cross_entropy", [&](Rng& rng, GradcheckCase& c) {
    const auto N = pick(rng, 1, 5), C = pick(rng, 2, 5);
    std::vector<std::int32_t> t(static_cast<std::size_t>(N));
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(N), 1);
    for (auto& v : t) v = static_cast<std::int32_t>(rng.below(static_cast<std::uint64_t>(C)));
    for (std::size_t i = 1; i < mask.size(); ++i) mask[i] = rng.below(4) != 0;
    Tensor logits = rand_t(rng, {N, C}, 2.0f);
    check(c, [&](const Tensor& x) { return ops::softmax_cross_entropy(x, t, mask); }, logits, eps);
  });

  run("charcnn_highway", [&](Rng& rng, GradcheckCase& c) {
    textforge::TokenEmbeddingSpec spec;
    spec.char_vocab = pick(rng, 3, 8);
    spec.char_dim = pick(rng, 1, 3);
    spec.char_filters = pick(rng, 1, 3);
    spec.max_chars = pick(rng, 2, 5);
    spec.char_widths = {pick(rng, 1, 3), pick(rng, 2, 3)};
    spec.highway_layers = pick(rng, 1, 2);
    textforge::TokenEmbedding emb(spec, &rng);
    const auto B = pick(rng, 1, 2), T = pick(rng, 1, 3);
    IdTensor ids = IdTensor::zeros({B, T, spec.max_chars});
    for (std::int64_t p = 0; p < B * T; ++p) {
      const auto n = pick(rng, 1, spec.max_chars);
      for (std::int64_t k = 0; k < n; ++k) {
        ids.data[static_cast<std::size_t>(p * spec.max_chars + k)] =
            static_cast<std::int32_t>(pick(rng, 1, spec.char_vocab - 1));
      }
    }
    Tensor r = rand_t(rng, {B, T, spec.char_output_dim()});
    for (auto& [name, p] : emb.named_parameters()) {
      // Break the zero init of biases so relu kinks are not all at 0.
      for (auto& v : p.data()) v += rng.uniform(-0.3f, 0.3f);
      check(c, [&](const Tensor&) { return project(emb.char_forward(ids), r); }, p, eps);
    }
  });

  auto model_case = [&](const std::string& name, const std::string& config, const nlohmann::json& body) {
    run(name, [&](Rng& rng, GradcheckCase& c) {
      nlohmann::json patch = model_patch("doc_classification", "doc_model", body);
      patch["task"]["doc_classification"]["trainer"] = {{"trainer", {{"batch_size", 4}}}};
      auto task = load_toy_task(toy_dir, config, patch, rng.next_u64());
      textforge::Trainer trainer(task.pipeline, task.data);
      const auto batches = trainer.epoch_batches(static_cast<std::int64_t>(rng.below(4)));
      const auto& batch = batches.front();
      const auto& model = *task.pipeline.model;
      for (auto& [pname, p] : model.named_parameters()) {
        for (auto& v : p.data()) v += rng.uniform(-0.05f, 0.05f);
        check(c, [&](const Tensor&) { return model.loss(batch); }, p, eps);
      }
    });
  };
  model_case("docnn_model", "doc_cnn.json",
             {{"embedding", {{"token_embedding", {{"word_dim", 4}}}}},
              {"representation", {{"docnn", {{"kernel_num", 3}, {"kernel_sizes", {2, 3}}}}}}});
  model_case("bilstm_attn_model", "doc_bilstm_attn.json",
             {{"embedding",
               {{"token_embedding",
                 {{"word_dim", 4}, {"char_dim", 3}, {"char_filters", 2}, {"char_widths", {2}}, {"cap_dim", 2}}}}},
              {"representation", {{"bilstm_attn", {{"hidden_dim", 3}, {"attention_dim", 3}}}}}});
  return out;
}

}  // namespace tf_test
