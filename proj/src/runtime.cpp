// Copyright 2026 The TextForge Authors.
// SPDX-License-Identifier: Apache-2.0

#include "textforge/runtime.hpp"

#include <algorithm>
#include <cmath>

#include "textforge/error.hpp"
#include "textforge/kernels.hpp"
#include "textforge/pipeline.hpp"
#include "textforge/rng.hpp"

namespace textforge {
namespace {

using Dims = std::vector<std::int64_t>;
using kernels::Index;

std::int64_t numel(const Dims& d) {
  std::int64_t n = 1;
  for (auto v : d) n *= v;
  return n;
}

[[noreturn]] void type_mismatch(const std::string& msg) { throw Error(ErrorCode::InputTypeMismatch, msg); }

NumericExample numericalize_text(std::string_view text, const std::vector<GazetteerEntry>& entries,
                                 const Vocabs& vocabs, const FeaturizerSettings& settings) {
  Example ex;
  ex.text = std::string(text);
  ex.gazetteer = entries;
  ex.features = featurize(text, entries, settings);
  return numericalize_example(ex, 0, vocabs, settings);
}

}  // namespace

GraphRunner::GraphRunner(StaticGraph graph) : graph_(std::move(graph)) {
  const auto infos = validate_graph(graph_);
  try {
    head_ = graph_.meta.at("head").get<std::string>() == "doc" ? HeadKind::Doc : HeadKind::Word;
    labels_ = graph_.meta.at("labels").get<std::vector<std::string>>();
    settings_.lowercase = graph_.meta.at("featurizer").at("lowercase").get<bool>();
    settings_.max_chars = graph_.meta.at("featurizer").at("max_chars").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::CorruptGraph, std::string("graph meta: ") + e.what());
  }

  auto add = [&](const std::string& name) {
    slot_names_.push_back(name);
    slot_info_.push_back(infos.at(name));
    consts_.push_back(nullptr);
    vocabs_.emplace_back();
  };
  for (const auto& in : graph_.inputs) add(in.name);
  for (const auto& [name, c] : graph_.consts) {
    add(name);
    consts_.back() = &c;
  }
  for (const auto& [name, entries] : graph_.vocab_tables) {
    add(name);
    try {
      vocabs_.back() = std::make_unique<Vocabulary>(Vocabulary::from_entries(entries, 1));
    } catch (const Error& e) {
      throw Error(ErrorCode::CorruptGraph, "vocab table '" + name + "': " + e.what());
    }
  }
  for (const auto& op : graph_.ops) {
    Step st{op.opcode, {}, 0, op.attrs};
    for (const auto& n : op.inputs) st.in.push_back(slot(n));
    add(op.outputs.front());
    st.out = static_cast<int>(slot_names_.size()) - 1;
    steps_.push_back(std::move(st));
  }
  labels_slot_ = slot(graph_.outputs[0]);
  scores_slot_ = slot(graph_.outputs[1]);
  const auto C = slot_info_[static_cast<std::size_t>(scores_slot_)].shape[1];
  if (C != static_cast<std::int64_t>(labels_.size())) {
    throw Error(ErrorCode::CorruptGraph, "graph has " + std::to_string(C) + " classes but " +
                                             std::to_string(labels_.size()) + " label names");
  }
}

int GraphRunner::slot(std::string_view name) const {
  for (std::size_t i = 0; i < slot_names_.size(); ++i) {
    if (slot_names_[i] == name) return static_cast<int>(i);
  }
  return -1;
}

void GraphRunner::prepare(Scratch& s) const {
  const auto n = slot_names_.size();
  s.f.resize(n);
  s.i.resize(n);
  s.shape.resize(n);
  s.strings.assign(n, nullptr);
}

GraphPrediction GraphRunner::run_text(std::string_view text, const std::vector<GazetteerEntry>& entries,
                                      Scratch* scratch) const {
  if (!baked()) type_mismatch("graph takes id tensors; bake its vocabularies to run raw text");
  const auto fe = featurize(text, entries, settings_);
  std::vector<std::string> tokens, caps, gaz;
  for (std::size_t i = 0; i < fe.tokens.size(); ++i) {
    tokens.push_back(fe.tokens[i].text);
    caps.emplace_back(cap_feature_name(fe.cap_features[i]));
    const auto& g = fe.gazetteer_labels[i];
    gaz.emplace_back(g ? std::string_view(*g) : kNoGazetteer);
  }
  return run_strings(tokens, caps, gaz, scratch);
}

GraphPrediction GraphRunner::run_tokens(const std::vector<std::string>& tokens, Scratch* scratch) const {
  if (!baked()) type_mismatch("graph takes id tensors; bake its vocabularies to run tokens");
  std::vector<std::string> caps, gaz(tokens.size(), std::string(kNoGazetteer));
  for (const auto& t : tokens) caps.emplace_back(cap_feature_name(cap_feature(t)));
  return run_strings(tokens, caps, gaz, scratch);
}

GraphPrediction GraphRunner::run_strings(const std::vector<std::string>& tokens,
                                         const std::vector<std::string>& caps,
                                         const std::vector<std::string>& gaz, Scratch* scratch) const {
  Scratch local;
  Scratch& s = scratch ? *scratch : local;
  prepare(s);
  for (const auto& in : graph_.inputs) {
    const int k = slot(in.name);
    if (in.type != SlotType::Strings) type_mismatch("graph input '" + in.name + "' is not a string list");
    if (in.name == "tokens") s.strings[k] = &tokens;
    else if (in.name == "caps") s.strings[k] = &caps;
    else if (in.name == "gazetteer") s.strings[k] = &gaz;
    else type_mismatch("unknown graph input '" + in.name + "'");
  }
  return execute(s, static_cast<std::int64_t>(tokens.size()));
}

GraphPrediction GraphRunner::run_ids(const NumericExample& ids, Scratch* scratch) const {
  if (baked()) type_mismatch("graph has baked vocabularies and takes strings, not id tensors");
  Scratch local;
  Scratch& s = scratch ? *scratch : local;
  prepare(s);
  const auto n = static_cast<std::int64_t>(ids.token_ids.size());
  const auto L = std::max<std::int64_t>(1, n);
  for (const auto& in : graph_.inputs) {
    const int k = slot(in.name);
    if (in.type != SlotType::Int) type_mismatch("graph input '" + in.name + "' is not an id tensor");
    const std::vector<std::int32_t>* src = nullptr;
    std::int64_t width = 1;
    if (in.name == "token_ids") src = &ids.token_ids;
    else if (in.name == "cap_ids") src = &ids.cap_ids;
    else if (in.name == "gaz_ids") src = &ids.gaz_ids;
    else if (in.name == "char_ids") {
      src = &ids.char_ids;
      width = in.shape.at(1);
    } else {
      type_mismatch("unknown graph input '" + in.name + "'");
    }
    if (static_cast<std::int64_t>(src->size()) != n * width) {
      type_mismatch("input '" + in.name + "' has " + std::to_string(src->size()) + " ids for " +
                    std::to_string(n) + " tokens");
    }
    auto& buf = s.i[k];
    buf.assign(static_cast<std::size_t>(L * width), 0);
    std::copy(src->begin(), src->end(), buf.begin());
    s.shape[k] = width == 1 ? Dims{L} : Dims{L, width};
  }
  return execute(s, n);
}

GraphPrediction GraphRunner::execute(Scratch& s, std::int64_t n) const {
  const std::int64_t L = std::max<std::int64_t>(1, n);
  auto fdata = [&](int k) -> const float* {
    return consts_[k] ? consts_[k]->values.data() : s.f[k].data();
  };
  auto dims = [&](int k) -> const Dims& { return consts_[k] ? consts_[k]->shape : s.shape[k]; };

  for (const auto& st : steps_) {
    Dims& out_shape = s.shape[st.out];
    out_shape = slot_info_[static_cast<std::size_t>(st.out)].shape;
    for (auto& d : out_shape) {
      if (d == kSeq) d = L;
    }
    const auto out_n = static_cast<std::size_t>(numel(out_shape));
    auto fout = [&]() -> float* {
      s.f[st.out].resize(out_n);
      return s.f[st.out].data();
    };
    auto iout = [&]() -> std::int32_t* {
      s.i[st.out].resize(out_n);
      return s.i[st.out].data();
    };

    switch (st.opcode) {
      case Opcode::LookupTokens:
      case Opcode::LookupChars: {
        const auto& strs = *s.strings[st.in[0]];
        if (static_cast<std::int64_t>(strs.size()) != n) type_mismatch("string inputs differ in length");
        const Vocabulary& v = *vocabs_[st.in[1]];
        std::int32_t* y = iout();
        std::fill(y, y + out_n, Vocabulary::kPadId);
        if (st.opcode == Opcode::LookupTokens) {
          for (std::int64_t t = 0; t < n; ++t) y[t] = v.id(strs[t]);
        } else {
          const auto C = st.attrs[0];
          for (std::int64_t t = 0; t < n; ++t) {
            const auto row = char_ids(strs[t], v, static_cast<int>(C));
            std::copy(row.begin(), row.end(), y + t * C);
          }
        }
        break;
      }
      case Opcode::EmbedGather: {
        const auto& table = dims(st.in[0]);
        const auto& ids = s.i[st.in[1]];
        for (auto id : ids) {
          if (id < 0 || id >= table[0]) {
            throw Error(ErrorCode::IdOutOfRange, "id " + std::to_string(id) + " outside table of " +
                                                     std::to_string(table[0]) + " rows");
          }
        }
        kernels::embedding_gather(fdata(st.in[0]), table[1], ids.data(), static_cast<Index>(ids.size()),
                                  fout());
        break;
      }
      case Opcode::MatMulAdd: {
        const auto& x = dims(st.in[0]);
        const auto& w = dims(st.in[1]);
        kernels::linear(fdata(st.in[0]), fdata(st.in[1]), fdata(st.in[2]), fout(), x[0], x[1], w[1]);
        break;
      }
      case Opcode::Tanh:
      case Opcode::Sigmoid:
      case Opcode::Relu: {
        const float* x = fdata(st.in[0]);
        float* y = fout();
        if (st.opcode == Opcode::Tanh) {
          for (std::size_t j = 0; j < out_n; ++j) y[j] = std::tanh(x[j]);
        } else if (st.opcode == Opcode::Sigmoid) {
          for (std::size_t j = 0; j < out_n; ++j) y[j] = kernels::sigmoid(x[j]);
        } else {
          for (std::size_t j = 0; j < out_n; ++j) y[j] = kernels::relu(x[j]);
        }
        break;
      }
      case Opcode::Conv1DMaxPool: {
        const auto& x = dims(st.in[0]);
        const auto& f = dims(st.in[1]);
        const bool seq = x.size() == 2;
        const Index B = seq ? 1 : x[0], T = seq ? x[0] : x[1], D = x.back();
        s.lengths.assign(static_cast<std::size_t>(B), T);
        if (st.in.size() == 4) {
          const auto& ids = s.i[st.in[3]];
          for (Index b = 0; b < B; ++b) {
            Index count = 0;
            for (Index c = 0; c < T; ++c) count += ids[b * T + c] != 0 ? 1 : 0;
            s.lengths[b] = std::max<Index>(1, count);
          }
        }
        kernels::conv1d_maxpool(fdata(st.in[0]), s.lengths.data(), B, T, D, fdata(st.in[1]), f[0], f[2],
                                fdata(st.in[2]), st.attrs[0] != 0, fout(), nullptr);
        break;
      }
      case Opcode::LSTMSeq: {
        const auto& x = dims(st.in[0]);
        const auto& wh = dims(st.in[2]);
        s.lengths.assign(1, x[0]);
        kernels::lstm_sequence(fdata(st.in[0]), s.lengths.data(), 1, x[0], x[1], wh[0], fdata(st.in[1]),
                               fdata(st.in[2]), fdata(st.in[3]), st.attrs[0] != 0, fout(), nullptr,
                               nullptr);
        break;
      }
      case Opcode::Concat: {
        float* y = fout();
        const Index total = out_shape.back();
        const Index rows = total ? static_cast<Index>(out_n) / total : 0;
        Index off = 0;
        for (int k : st.in) {
          const Index w = dims(k).back();
          const float* x = fdata(k);
          for (Index r = 0; r < rows; ++r) std::copy_n(x + r * w, w, y + r * total + off);
          off += w;
        }
        break;
      }
      case Opcode::SelfAttention: {
        const auto& h = dims(st.in[0]);
        const auto& w1 = dims(st.in[1]);
        s.lengths.assign(1, h[0]);
        kernels::self_attention(fdata(st.in[0]), s.lengths.data(), 1, h[0], h[1], fdata(st.in[1]),
                                fdata(st.in[2]), w1[1], fout(), nullptr, nullptr);
        break;
      }
      case Opcode::Softmax: {
        const auto& x = dims(st.in[0]);
        kernels::softmax_rows(fdata(st.in[0]), fout(), x[0], x[1]);
        break;
      }
      case Opcode::ArgMax: {
        const auto& x = dims(st.in[0]);
        const float* v = fdata(st.in[0]);
        std::int32_t* y = iout();
        for (std::int64_t r = 0; r < x[0]; ++r) {
          y[r] = argmax(std::span<const float>(v + r * x[1], static_cast<std::size_t>(x[1])));
        }
        break;
      }
      case Opcode::Highway: {
        const auto& xd = dims(st.in[0]);
        const Index M = xd[0], N = xd[1];
        const float* x = fdata(st.in[0]);
        s.tmp_a.resize(out_n);
        s.tmp_b.resize(out_n);
        kernels::linear(x, fdata(st.in[1]), fdata(st.in[2]), s.tmp_a.data(), M, N, N);
        kernels::linear(x, fdata(st.in[3]), fdata(st.in[4]), s.tmp_b.data(), M, N, N);
        float* y = fout();
        for (std::size_t j = 0; j < out_n; ++j) {
          const float h = kernels::relu(s.tmp_a[j]);
          const float g = kernels::sigmoid(s.tmp_b[j]);
          y[j] = x[j] + g * (h - x[j]);
        }
        break;
      }
    }
  }

  GraphPrediction p;
  const auto& sd = s.shape[scores_slot_];
  p.num_classes = sd[1];
  const std::int64_t rows = head_ == HeadKind::Doc ? 1 : n;
  const auto& lab = s.i[labels_slot_];
  const auto& sc = s.f[scores_slot_];
  p.labels.assign(lab.begin(), lab.begin() + rows);
  p.scores.assign(sc.begin(), sc.begin() + rows * p.num_classes);
  for (auto l : p.labels) p.label_names.push_back(labels_.at(static_cast<std::size_t>(l)));
  return p;
}

EquivalenceReport verify_equivalence(const SingleTaskModel& model, const GraphRunner& graph,
                                     const Vocabs& vocabs, std::span<const Example> pool,
                                     std::size_t n_samples, double tol, std::uint64_t seed) {
  if (n_samples == 0) throw Error(ErrorCode::EmptySampleSet, "verify_equivalence needs at least one sample");
  const auto& settings = graph.featurizer();
  Rng rng = Rng::derive(seed, 7);
  EquivalenceReport rep;
  Scratch scratch;

  auto compare = [&](const Prediction& eager, const GraphPrediction& g) {
    ++rep.samples;
    if (eager.labels != g.labels || eager.scores.size() != g.scores.size()) {
      rep.argmax_agree = false;
      if (eager.scores.size() != g.scores.size()) {
        rep.max_abs_deviation = std::max(rep.max_abs_deviation, 1.0);
        return;
      }
    }
    for (std::size_t j = 0; j < g.scores.size(); ++j) {
      rep.max_abs_deviation =
          std::max(rep.max_abs_deviation, std::abs(static_cast<double>(eager.scores[j]) - g.scores[j]));
    }
  };

  if (!pool.empty()) {
    for (std::size_t k = 0; k < n_samples; ++k) {
      const Example& ex = pool[static_cast<std::size_t>(rng.below(pool.size()))];
      const auto eager = model.predict(make_text_batch(ex.text, ex.gazetteer, vocabs, settings)).front();
      const auto g = graph.baked() ? graph.run_text(ex.text, ex.gazetteer, &scratch)
                                   : graph.run_ids(numericalize_text(ex.text, ex.gazetteer, vocabs, settings),
                                                   &scratch);
      compare(eager, g);
    }
  }
  for (std::size_t k = 0; k < n_samples; ++k) {
    std::vector<std::string> tokens(static_cast<std::size_t>(rng.below(9)));
    for (auto& tok : tokens) {
      const bool oov = vocabs.tokens.size() <= 2 || rng.below(4) == 0;
      tok = oov ? "oov" + std::to_string(rng.below(1000))
                : vocabs.tokens.token(static_cast<std::int32_t>(2 + rng.below(vocabs.tokens.size() - 2)));
      if (!tok.empty() && rng.below(5) == 0 && tok[0] >= 'a' && tok[0] <= 'z') tok[0] = static_cast<char>(tok[0] - 32);
    }
    const auto eager = model.predict(make_token_batch(tokens, vocabs, settings)).front();
    const auto g = graph.baked() ? graph.run_tokens(tokens, &scratch)
                                 : graph.run_ids(numericalize_tokens(tokens, vocabs, settings), &scratch);
    compare(eager, g);
  }
  rep.passed = rep.argmax_agree && rep.max_abs_deviation < tol;
  return rep;
}

}  // namespace textforge
