// Copyright 2026 The TextForge Authors.
// SPDX-License-Identifier: Apache-2.0

#include "textforge/exporter.hpp"

#include <algorithm>
#include <map>

#include "textforge/error.hpp"

namespace textforge {
namespace {

[[noreturn]] void unsupported(const std::string& what) { throw Error(ErrorCode::UnsupportedModule, what); }

class Lowering {
 public:
  explicit Lowering(const SingleTaskModel& m) {
    for (const auto& [name, t] : m.named_parameters()) params_.emplace(name, t);
  }

  /// Adds the parameter at `path` as a const and returns its slot name.
  std::string weight(const std::string& path) {
    const auto it = params_.find(path);
    if (it == params_.end()) unsupported("no parameter '" + path + "' to lower");
    const Tensor& t = it->second;
    g.consts[path] = GraphConst{t.shape(), std::vector<float>(t.data().begin(), t.data().end())};
    return path;
  }

  std::string op(Opcode code, std::vector<std::string> in, std::string out, std::vector<std::int64_t> attrs = {}) {
    g.ops.push_back({code, std::move(in), {out}, std::move(attrs)});
    return out;
  }

  std::string concat(const std::vector<std::string>& parts, const std::string& out) {
    return parts.size() == 1 ? parts.front() : op(Opcode::Concat, parts, out);
  }

  std::string bilstm(const std::string& x, const std::string& p, const std::string& out) {
    const auto f = op(Opcode::LSTMSeq, {x, weight(p + ".fwd.w_ih"), weight(p + ".fwd.w_hh"), weight(p + ".fwd.bias")},
                      out + ".fwd", {0});
    const auto b = op(Opcode::LSTMSeq, {x, weight(p + ".bwd.w_ih"), weight(p + ".bwd.w_hh"), weight(p + ".bwd.bias")},
                      out + ".bwd", {1});
    return op(Opcode::Concat, {f, b}, out);
  }

  StaticGraph g;

 private:
  std::map<std::string, Tensor> params_;
};

std::string lower_embedding(Lowering& lw, const TokenEmbedding& emb) {
  const auto& s = emb.spec();
  std::vector<std::string> parts;
  if (s.uses_words()) {
    lw.g.inputs.push_back({"token_ids", SlotType::Int, {kSeq}});
    parts.push_back(lw.op(Opcode::EmbedGather, {lw.weight("embedding.word.table"), "token_ids"}, "emb.word"));
  }
  if (s.uses_chars()) {
    lw.g.inputs.push_back({"char_ids", SlotType::Int, {kSeq, s.max_chars}});
    const auto vecs = lw.op(Opcode::EmbedGather, {lw.weight("embedding.char.table"), "char_ids"}, "emb.char.vecs");
    std::vector<std::string> pooled;
    for (std::size_t i = 0; i < s.char_widths.size(); ++i) {
      const std::string p = "embedding.char.conv" + std::to_string(i);
      pooled.push_back(lw.op(Opcode::Conv1DMaxPool, {vecs, lw.weight(p + ".w"), lw.weight(p + ".b"), "char_ids"},
                             "emb.char.pool" + std::to_string(i), {1}));
    }
    std::string y = lw.concat(pooled, "emb.char.cat");
    for (std::int64_t l = 0; l < s.highway_layers; ++l) {
      const std::string p = "embedding.highway" + std::to_string(l) + ".";
      y = lw.op(Opcode::Highway, {y, lw.weight(p + "w1"), lw.weight(p + "b1"), lw.weight(p + "w2"), lw.weight(p + "b2")},
                "emb.char.highway" + std::to_string(l));
    }
    parts.push_back(y);
  }
  if (s.uses_caps()) {
    lw.g.inputs.push_back({"cap_ids", SlotType::Int, {kSeq}});
    parts.push_back(lw.op(Opcode::EmbedGather, {lw.weight("embedding.cap.table"), "cap_ids"}, "emb.cap"));
  }
  if (s.uses_gazetteer()) {
    lw.g.inputs.push_back({"gaz_ids", SlotType::Int, {kSeq}});
    parts.push_back(lw.op(Opcode::EmbedGather, {lw.weight("embedding.gaz.table"), "gaz_ids"}, "emb.gaz"));
  }
  if (parts.empty()) throw Error(ErrorCode::NoStyleSelected, "embedding has no style to lower");
  return lw.concat(parts, "emb");
}

std::string lower_representation(Lowering& lw, const Representation& rep, const std::string& x) {
  if (const auto* cnn = dynamic_cast<const DocNN*>(&rep)) {
    std::vector<std::string> pooled;
    for (std::size_t i = 0; i < cnn->widths().size(); ++i) {
      const std::string p = "representation.conv" + std::to_string(i);
      pooled.push_back(lw.op(Opcode::Conv1DMaxPool, {x, lw.weight(p + ".w"), lw.weight(p + ".b")},
                             "rep.pool" + std::to_string(i), {1}));
    }
    return lw.concat(pooled, "rep");
  }
  if (dynamic_cast<const BiLSTMAttn*>(&rep)) {
    const auto hs = lw.bilstm(x, "representation.lstm", "rep.lstm");
    return lw.op(Opcode::SelfAttention,
                 {hs, lw.weight("representation.attention.w1"), lw.weight("representation.attention.w2")}, "rep");
  }
  if (dynamic_cast<const BiLSTMTagger*>(&rep)) return lw.bilstm(x, "representation.lstm", "rep");
  unsupported("representation '" + rep.type_name() + "' has no graph lowering");
}

}  // namespace

StaticGraph export_head(const SingleTaskModel& model, const Vocabs& vocabs, const FeaturizerSettings& settings) {
  NoGradGuard guard;
  Lowering lw(model);
  const auto* emb = dynamic_cast<const TokenEmbedding*>(model.child("embedding").get());
  if (!emb) unsupported("embedding '" + model.child("embedding")->type_name() + "' has no graph lowering");
  std::string x = lower_embedding(lw, *emb);
  x = lower_representation(lw, model.representation(), x);

  const auto* dec = dynamic_cast<const MlpDecoder*>(model.child("decoder").get());
  if (!dec) unsupported("decoder '" + model.child("decoder")->type_name() + "' has no graph lowering");
  for (std::size_t i = 0; i < dec->hidden_dims().size(); ++i) {
    const std::string p = "decoder.layer" + std::to_string(i);
    x = lw.op(Opcode::MatMulAdd, {x, lw.weight(p + ".w"), lw.weight(p + ".b")}, "dec.hidden" + std::to_string(i));
    x = lw.op(Opcode::Relu, {x}, "dec.relu" + std::to_string(i));
  }
  x = lw.op(Opcode::MatMulAdd, {x, lw.weight("decoder.out.w"), lw.weight("decoder.out.b")}, "logits");

  const Module& out = model.output_layer();
  const bool doc = model.head_kind() == HeadKind::Doc;
  if (doc ? !dynamic_cast<const ClassificationOutput*>(&out) : !dynamic_cast<const WordTaggingOutput*>(&out)) {
    unsupported("output layer '" + out.type_name() + "' has no graph lowering");
  }
  lw.op(Opcode::Softmax, {x}, "scores");
  lw.op(Opcode::ArgMax, {"scores"}, "labels");
  lw.g.outputs = {"labels", "scores"};

  lw.g.meta = {{"head", std::string(head_kind_name(model.head_kind()))},
               {"labels", doc ? vocabs.doc_labels.labels() : vocabs.word_labels.labels()},
               {"featurizer", {{"lowercase", settings.lowercase}, {"max_chars", settings.max_chars}}},
               {"representation", model.representation().type_name()},
               {"baked", false}};
  validate_graph(lw.g);
  return std::move(lw.g);
}

StaticGraph prepend_vocab(StaticGraph graph, const Vocabs& vocabs) {
  if (graph.baked() || graph.meta.value("baked", false)) {
    throw Error(ErrorCode::VocabAlreadyBaked, "graph already carries vocabulary tables");
  }
  std::vector<GraphOp> lookups;
  std::vector<GraphInput> inputs;
  auto need_input = [&](const std::string& name) {
    const bool have = std::any_of(inputs.begin(), inputs.end(), [&](const auto& i) { return i.name == name; });
    if (!have) inputs.push_back({name, SlotType::Strings, {}});
  };
  auto table = [&](const std::string& name, const Vocabulary& v) {
    graph.vocab_tables[name] = v.entries();
    return name;
  };
  for (const auto& in : graph.inputs) {
    if (in.type != SlotType::Int) throw Error(ErrorCode::InvalidArgument, "input '" + in.name + "' is not an id tensor");
    if (in.name == "token_ids") {
      need_input("tokens");
      lookups.push_back({Opcode::LookupTokens, {"tokens", table("vocab.tokens", vocabs.tokens)}, {in.name}, {}});
    } else if (in.name == "char_ids") {
      need_input("tokens");
      lookups.push_back({Opcode::LookupChars, {"tokens", table("vocab.chars", vocabs.chars)}, {in.name}, {in.shape.at(1)}});
    } else if (in.name == "cap_ids") {
      need_input("caps");
      lookups.push_back({Opcode::LookupTokens, {"caps", table("vocab.caps", vocabs.caps)}, {in.name}, {}});
    } else if (in.name == "gaz_ids") {
      need_input("gazetteer");
      lookups.push_back({Opcode::LookupTokens, {"gazetteer", table("vocab.gazetteer", vocabs.gazetteer)}, {in.name}, {}});
    } else {
      throw Error(ErrorCode::InvalidArgument, "no vocabulary for input '" + in.name + "'");
    }
  }
  graph.inputs = std::move(inputs);
  graph.ops.insert(graph.ops.begin(), lookups.begin(), lookups.end());
  graph.meta["baked"] = true;
  validate_graph(graph);
  return graph;
}

std::vector<std::pair<HeadKind, StaticGraph>> export_model(const TaskModel& model, const Vocabs& vocabs,
                                                           const FeaturizerSettings& settings, bool bake) {
  std::vector<std::pair<HeadKind, StaticGraph>> out;
  for (HeadKind h : model.heads()) {
    StaticGraph g = export_head(model.head(h), vocabs, settings);
    if (bake) g = prepend_vocab(std::move(g), vocabs);
    out.emplace_back(h, std::move(g));
  }
  return out;
}

std::filesystem::path head_graph_path(const std::filesystem::path& path, HeadKind head, bool multi_head) {
  if (!multi_head) return path;
  std::filesystem::path p = path;
  p.replace_filename(path.stem().string() + "." + std::string(head_kind_name(head)) + path.extension().string());
  return p;
}

}  // namespace textforge
