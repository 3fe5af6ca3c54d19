// Copyright 2026 The TextForge Authors.
// SPDX-License-Identifier: Apache-2.0

#include "textforge/modules.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>

#include "textforge/error.hpp"
#include "textforge/vocab.hpp"

namespace textforge {

using nlohmann::json;

namespace {

constexpr std::uint32_t kModuleVersion = 1;
constexpr std::string_view kModuleMagic = "TXMD";

std::shared_ptr<Module> child_at(const Module& m, std::string_view name) {
  for (const auto& [n, c] : m.children()) {
    if (n == name) return c;
  }
  return nullptr;
}

void check_last_dim(const Tensor& x, std::int64_t expected, const std::string& who) {
  if (x.rank() < 1 || x.dim(-1) != expected) {
    throw Error(ErrorCode::ShapeMismatch, who + " expects last dim " + std::to_string(expected) +
                                              ", got " + shape_str(x.shape()));
  }
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t' || line[pos] == '\r')) ++pos;
    const std::size_t start = pos;
    while (pos < line.size() && line[pos] != ' ' && line[pos] != '\t' && line[pos] != '\r') ++pos;
    if (pos > start) out.push_back(line.substr(start, pos - start));
  }
  return out;
}

template <typename T>
bool parse_number(const std::string& s, T& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

// ---------------------------------------------------------------------------
// Module

std::shared_ptr<Module> Module::child(std::string_view path) const {
  const auto dot = path.find('.');
  auto head = child_at(*this, path.substr(0, dot));
  if (!head || dot == std::string_view::npos) return head;
  return head->child(path.substr(dot + 1));
}

void Module::replace_child(std::string_view path, std::shared_ptr<Module> replacement) {
  const auto dot = path.find('.');
  if (dot != std::string_view::npos) {
    auto head = child_at(*this, path.substr(0, dot));
    if (!head) {
      throw Error(ErrorCode::InvalidArgument, "no module at '" + std::string(path) + "'");
    }
    head->replace_child(path.substr(dot + 1), std::move(replacement));
    return;
  }
  for (auto& [n, c] : children_) {
    if (n == path) {
      c = std::move(replacement);
      return;
    }
  }
  throw Error(ErrorCode::InvalidArgument, "no module at '" + std::string(path) + "'");
}

void Module::collect(const std::string& prefix, NamedTensors& out,
                     std::vector<const detail::TensorImpl*>& seen) const {
  for (const auto& [n, t] : params_) {
    if (std::find(seen.begin(), seen.end(), t.impl()) != seen.end()) continue;
    seen.push_back(t.impl());
    out.emplace_back(prefix + n, t);
  }
  for (const auto& [n, c] : children_) c->collect(prefix + n + ".", out, seen);
}

NamedTensors Module::named_parameters() const {
  NamedTensors out;
  std::vector<const detail::TensorImpl*> seen;
  collect("", out, seen);
  return out;
}

std::int64_t Module::parameter_count() const {
  std::int64_t n = 0;
  for (const auto& [name, t] : named_parameters()) n += t.numel();
  return n;
}

Tensor Module::add_param(std::string name, Shape shape) {
  Tensor t = Tensor::zeros(std::move(shape), true);
  params_.emplace_back(std::move(name), t);
  return t;
}

void Module::add_child(std::string name, std::shared_ptr<Module> m) {
  children_.emplace_back(std::move(name), std::move(m));
}

const Tensor& Module::param(std::string_view name) const {
  for (const auto& [n, t] : params_) {
    if (n == name) return t;
  }
  throw Error(ErrorCode::InvalidArgument, type_name() + " has no parameter '" + std::string(name) + "'");
}

void init_uniform(Tensor& t, float bound, Rng* rng) {
  if (rng) rng->fill_uniform(t.data(), -bound, bound);
}

void init_fan_in(Tensor& t, std::int64_t fan_in, Rng* rng) {
  init_uniform(t, std::sqrt(1.0f / static_cast<float>(std::max<std::int64_t>(fan_in, 1))), rng);
}

std::int32_t argmax(std::span<const float> row) {
  std::int32_t best = 0;
  for (std::size_t i = 1; i < row.size(); ++i) {
    if (row[i] > row[static_cast<std::size_t>(best)]) best = static_cast<std::int32_t>(i);
  }
  return best;
}

// ---------------------------------------------------------------------------
// Token embedding

json TokenEmbeddingSpec::to_json() const {
  return {{"type", "token_embedding"}, {"word_vocab", word_vocab},   {"word_dim", word_dim},
          {"char_vocab", char_vocab},  {"char_dim", char_dim},       {"char_filters", char_filters},
          {"max_chars", max_chars},    {"char_widths", char_widths}, {"highway_layers", highway_layers},
          {"cap_vocab", cap_vocab},    {"cap_dim", cap_dim},         {"gaz_vocab", gaz_vocab},
          {"gaz_dim", gaz_dim}};
}

TokenEmbeddingSpec TokenEmbeddingSpec::from_json(const json& j) {
  TokenEmbeddingSpec s;
  s.word_vocab = j.at("word_vocab");
  s.word_dim = j.at("word_dim");
  s.char_vocab = j.at("char_vocab");
  s.char_dim = j.at("char_dim");
  s.char_filters = j.at("char_filters");
  s.max_chars = j.at("max_chars");
  s.char_widths = j.at("char_widths").get<std::vector<std::int64_t>>();
  s.highway_layers = j.at("highway_layers");
  s.cap_vocab = j.at("cap_vocab");
  s.cap_dim = j.at("cap_dim");
  s.gaz_vocab = j.at("gaz_vocab");
  s.gaz_dim = j.at("gaz_dim");
  return s;
}

TokenEmbedding::TokenEmbedding(TokenEmbeddingSpec spec, Rng* rng) : spec_(std::move(spec)) {
  if (spec_.output_dim() <= 0) {
    throw Error(ErrorCode::NoStyleSelected, "token embedding selects no style");
  }
  if (spec_.uses_words()) {
    Tensor t = add_param("word.table", {spec_.word_vocab, spec_.word_dim});
    init_uniform(t, 0.1f, rng);
  }
  if (spec_.uses_chars()) {
    if (spec_.char_widths.empty() || spec_.char_filters < 1 || spec_.max_chars < 1) {
      throw Error(ErrorCode::InvalidArgument, "char embedding needs widths, filters and max_chars");
    }
    Tensor t = add_param("char.table", {spec_.char_vocab, spec_.char_dim});
    init_uniform(t, 0.1f, rng);
    for (std::size_t i = 0; i < spec_.char_widths.size(); ++i) {
      const auto w = spec_.char_widths[i];
      Tensor f = add_param("char.conv" + std::to_string(i) + ".w", {w, spec_.char_dim, spec_.char_filters});
      init_fan_in(f, w * spec_.char_dim, rng);
      add_param("char.conv" + std::to_string(i) + ".b", {spec_.char_filters});
    }
    const auto E = spec_.char_output_dim();
    for (std::int64_t l = 0; l < spec_.highway_layers; ++l) {
      const std::string p = "highway" + std::to_string(l) + ".";
      Tensor w1 = add_param(p + "w1", {E, E});
      init_fan_in(w1, E, rng);
      add_param(p + "b1", {E});
      Tensor w2 = add_param(p + "w2", {E, E});
      init_fan_in(w2, E, rng);
      add_param(p + "b2", {E});
    }
  }
  if (spec_.uses_caps()) {
    Tensor t = add_param("cap.table", {spec_.cap_vocab, spec_.cap_dim});
    init_uniform(t, 0.1f, rng);
  }
  if (spec_.uses_gazetteer()) {
    Tensor t = add_param("gaz.table", {spec_.gaz_vocab, spec_.gaz_dim});
    init_uniform(t, 0.1f, rng);
  }
}

std::vector<std::int64_t> TokenEmbedding::char_lengths(const IdTensor& char_ids) {
  const auto C = char_ids.shape.back();
  const auto n = C == 0 ? 0 : static_cast<std::int64_t>(char_ids.data.size()) / C;
  std::vector<std::int64_t> lens(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    std::int64_t count = 0;
    for (std::int64_t c = 0; c < C; ++c) count += char_ids.data[i * C + c] != 0 ? 1 : 0;
    lens[i] = std::max<std::int64_t>(1, count);
  }
  return lens;
}

Tensor highway(const Tensor& x, const Tensor& w1, const Tensor& b1, const Tensor& w2,
               const Tensor& b2) {
  Tensor h = ops::relu(ops::linear(x, w1, b1));
  Tensor g = ops::sigmoid(ops::linear(x, w2, b2));
  return ops::add(x, ops::mul(g, ops::sub(h, x)));
}

Tensor TokenEmbedding::char_forward(const IdTensor& char_ids) const {
  if (char_ids.shape.size() != 3 || char_ids.shape[2] != spec_.max_chars) {
    throw Error(ErrorCode::ShapeMismatch,
                "char ids must be [b, t, " + std::to_string(spec_.max_chars) + "], got " +
                    shape_str(char_ids.shape));
  }
  const auto B = char_ids.shape[0], T = char_ids.shape[1], C = char_ids.shape[2];
  Tensor emb = ops::embedding_lookup(param("char.table"), char_ids);
  Tensor flat = ops::reshape(emb, {B * T, C, spec_.char_dim});
  const auto lens = char_lengths(char_ids);
  std::vector<Tensor> pooled;
  for (std::size_t i = 0; i < spec_.char_widths.size(); ++i) {
    const std::string p = "char.conv" + std::to_string(i);
    pooled.push_back(ops::conv1d_maxpool(flat, param(p + ".w"), lens, param(p + ".b"), true));
  }
  Tensor y = pooled.size() == 1 ? pooled.front() : ops::concat(pooled);
  for (std::int64_t l = 0; l < spec_.highway_layers; ++l) {
    const std::string p = "highway" + std::to_string(l) + ".";
    y = highway(y, param(p + "w1"), param(p + "b1"), param(p + "w2"), param(p + "b2"));
  }
  return ops::reshape(y, {B, T, spec_.char_output_dim()});
}

Tensor TokenEmbedding::forward(const IdTensor& token_ids, const IdTensor& char_ids,
                               const IdTensor& cap_ids, const IdTensor& gaz_ids) const {
  std::vector<Tensor> parts;
  if (spec_.uses_words()) parts.push_back(ops::embedding_lookup(param("word.table"), token_ids));
  if (spec_.uses_chars()) parts.push_back(char_forward(char_ids));
  if (spec_.uses_caps()) parts.push_back(ops::embedding_lookup(param("cap.table"), cap_ids));
  if (spec_.uses_gazetteer()) parts.push_back(ops::embedding_lookup(param("gaz.table"), gaz_ids));
  return parts.size() == 1 ? parts.front() : ops::concat(parts);
}

// ---------------------------------------------------------------------------
// Representations

DocNN::DocNN(std::int64_t input_dim, std::int64_t kernel_num, std::vector<std::int64_t> widths,
             Rng* rng)
    : input_dim_(input_dim), kernel_num_(kernel_num), widths_(std::move(widths)) {
  if (widths_.empty() || kernel_num_ < 1) {
    throw Error(ErrorCode::InvalidArgument, "docnn needs kernel sizes and kernel_num >= 1");
  }
  for (std::size_t i = 0; i < widths_.size(); ++i) {
    Tensor w = add_param("conv" + std::to_string(i) + ".w", {widths_[i], input_dim_, kernel_num_});
    init_fan_in(w, widths_[i] * input_dim_, rng);
    add_param("conv" + std::to_string(i) + ".b", {kernel_num_});
  }
}

json DocNN::build_spec() const {
  return {{"type", type_name()}, {"input_dim", input_dim_}, {"kernel_num", kernel_num_},
          {"kernel_sizes", widths_}};
}

Tensor DocNN::forward(const Tensor& x, ops::Lengths lengths) const {
  check_last_dim(x, input_dim_, "docnn");
  std::vector<Tensor> pooled;
  for (std::size_t i = 0; i < widths_.size(); ++i) {
    const std::string p = "conv" + std::to_string(i);
    pooled.push_back(ops::conv1d_maxpool(x, param(p + ".w"), lengths, param(p + ".b"), true));
  }
  return pooled.size() == 1 ? pooled.front() : ops::concat(pooled);
}

BiLSTM::BiLSTM(std::int64_t input_dim, std::int64_t hidden_dim, Rng* rng)
    : input_dim_(input_dim), hidden_dim_(hidden_dim) {
  if (hidden_dim_ < 1) throw Error(ErrorCode::InvalidArgument, "hidden_dim must be >= 1");
  for (const char* dir : {"fwd", "bwd"}) {
    const std::string p = std::string(dir) + ".";
    Tensor w_ih = add_param(p + "w_ih", {input_dim_, 4 * hidden_dim_});
    init_fan_in(w_ih, input_dim_, rng);
    Tensor w_hh = add_param(p + "w_hh", {hidden_dim_, 4 * hidden_dim_});
    init_fan_in(w_hh, hidden_dim_, rng);
    Tensor bias = add_param(p + "bias", {4 * hidden_dim_});
    auto b = bias.data();
    std::fill(b.begin() + hidden_dim_, b.begin() + 2 * hidden_dim_, 1.0f);
  }
}

json BiLSTM::build_spec() const {
  return {{"type", type_name()}, {"input_dim", input_dim_}, {"hidden_dim", hidden_dim_}};
}

Tensor BiLSTM::forward(const Tensor& x, ops::Lengths lengths) const {
  check_last_dim(x, input_dim_, "bilstm");
  Tensor f = ops::lstm(x, param("fwd.w_ih"), param("fwd.w_hh"), param("fwd.bias"), lengths, false);
  Tensor b = ops::lstm(x, param("bwd.w_ih"), param("bwd.w_hh"), param("bwd.bias"), lengths, true);
  const Tensor parts[] = {f, b};
  return ops::concat(parts);
}

SelfAttention::SelfAttention(std::int64_t input_dim, std::int64_t attention_dim, Rng* rng)
    : input_dim_(input_dim), attention_dim_(attention_dim) {
  if (attention_dim_ < 1) throw Error(ErrorCode::InvalidArgument, "attention_dim must be >= 1");
  Tensor w1 = add_param("w1", {input_dim_, attention_dim_});
  init_fan_in(w1, input_dim_, rng);
  Tensor w2 = add_param("w2", {attention_dim_});
  init_fan_in(w2, attention_dim_, rng);
}

json SelfAttention::build_spec() const {
  return {{"type", type_name()}, {"input_dim", input_dim_}, {"attention_dim", attention_dim_}};
}

Tensor SelfAttention::forward(const Tensor& hs, ops::Lengths lengths) const {
  check_last_dim(hs, input_dim_, "self_attention");
  return ops::self_attention(hs, param("w1"), param("w2"), lengths);
}

BiLSTMAttn::BiLSTMAttn(std::int64_t input_dim, std::int64_t hidden_dim, std::int64_t attention_dim,
                       Rng* rng)
    : input_dim_(input_dim), hidden_dim_(hidden_dim), attention_dim_(attention_dim) {
  add_child("lstm", std::make_shared<BiLSTM>(input_dim, hidden_dim, rng));
  add_child("attention", std::make_shared<SelfAttention>(2 * hidden_dim, attention_dim, rng));
}

json BiLSTMAttn::build_spec() const {
  return {{"type", type_name()}, {"input_dim", input_dim_}, {"hidden_dim", hidden_dim_},
          {"attention_dim", attention_dim_}};
}

Tensor BiLSTMAttn::forward(const Tensor& x, ops::Lengths lengths) const {
  Tensor hs = child_as<BiLSTM>("lstm").forward(x, lengths);
  return child_as<SelfAttention>("attention").forward(hs, lengths);
}

BiLSTMTagger::BiLSTMTagger(std::int64_t input_dim, std::int64_t hidden_dim, Rng* rng)
    : input_dim_(input_dim), hidden_dim_(hidden_dim) {
  add_child("lstm", std::make_shared<BiLSTM>(input_dim, hidden_dim, rng));
}

json BiLSTMTagger::build_spec() const {
  return {{"type", type_name()}, {"input_dim", input_dim_}, {"hidden_dim", hidden_dim_}};
}

Tensor BiLSTMTagger::forward(const Tensor& x, ops::Lengths lengths) const {
  return child_as<BiLSTM>("lstm").forward(x, lengths);
}

// ---------------------------------------------------------------------------
// Decoder

MlpDecoder::MlpDecoder(std::int64_t input_dim, std::vector<std::int64_t> hidden_dims,
                       std::int64_t num_classes, Rng* rng)
    : input_dim_(input_dim), num_classes_(num_classes), hidden_dims_(std::move(hidden_dims)) {
  if (num_classes_ < 1) throw Error(ErrorCode::InvalidArgument, "decoder needs >= 1 class");
  std::int64_t in = input_dim_;
  for (std::size_t i = 0; i < hidden_dims_.size(); ++i) {
    Tensor w = add_param("layer" + std::to_string(i) + ".w", {in, hidden_dims_[i]});
    init_fan_in(w, in, rng);
    add_param("layer" + std::to_string(i) + ".b", {hidden_dims_[i]});
    in = hidden_dims_[i];
  }
  Tensor w = add_param("out.w", {in, num_classes_});
  init_fan_in(w, in, rng);
  add_param("out.b", {num_classes_});
}

json MlpDecoder::build_spec() const {
  return {{"type", type_name()}, {"input_dim", input_dim_}, {"hidden_dims", hidden_dims_},
          {"num_classes", num_classes_}};
}

Tensor MlpDecoder::forward(const Tensor& x) const {
  check_last_dim(x, input_dim_, "mlp decoder");
  Tensor y = x;
  for (std::size_t i = 0; i < hidden_dims_.size(); ++i) {
    const std::string p = "layer" + std::to_string(i);
    y = ops::relu(ops::linear(y, param(p + ".w"), param(p + ".b")));
  }
  return ops::linear(y, param("out.w"), param("out.b"));
}

// ---------------------------------------------------------------------------
// Construction and persistence

std::shared_ptr<Module> make_module(const json& spec, Rng* rng) {
  const std::string type = spec.at("type");
  if (type == "token_embedding") {
    return std::make_shared<TokenEmbedding>(TokenEmbeddingSpec::from_json(spec), rng);
  }
  if (type == "docnn") {
    return std::make_shared<DocNN>(spec.at("input_dim"), spec.at("kernel_num"),
                                   spec.at("kernel_sizes").get<std::vector<std::int64_t>>(), rng);
  }
  if (type == "bilstm") return std::make_shared<BiLSTM>(spec.at("input_dim"), spec.at("hidden_dim"), rng);
  if (type == "self_attention") {
    return std::make_shared<SelfAttention>(spec.at("input_dim"), spec.at("attention_dim"), rng);
  }
  if (type == "bilstm_attn") {
    return std::make_shared<BiLSTMAttn>(spec.at("input_dim"), spec.at("hidden_dim"),
                                        spec.at("attention_dim"), rng);
  }
  if (type == "bilstm_tagger") {
    return std::make_shared<BiLSTMTagger>(spec.at("input_dim"), spec.at("hidden_dim"), rng);
  }
  if (type == "mlp") {
    return std::make_shared<MlpDecoder>(spec.at("input_dim"),
                                        spec.at("hidden_dims").get<std::vector<std::int64_t>>(),
                                        spec.at("num_classes"), rng);
  }
  if (type == "classification_output") return std::make_shared<ClassificationOutput>();
  if (type == "word_tagging_output") return std::make_shared<WordTaggingOutput>();
  throw Error(ErrorCode::UnsupportedModule, "unknown module type '" + type + "'");
}

void write_tensors(binio::ByteWriter& w, const NamedTensors& tensors) {
  w.u64(tensors.size());
  for (const auto& [name, t] : tensors) {
    w.str(name);
    w.i64s(t.shape());
    w.f32s(t.data());
  }
}

NamedTensors read_tensors(binio::ByteReader& r) {
  NamedTensors out;
  const auto n = r.u64();
  for (std::uint64_t i = 0; i < n; ++i) {
    auto name = r.str();
    auto shape = r.i64s();
    auto values = r.f32s();
    if (shape_numel(shape) != static_cast<std::int64_t>(values.size())) {
      throw Error(ErrorCode::CorruptFile, "tensor '" + name + "' size does not match its shape");
    }
    out.emplace_back(std::move(name), Tensor::from(std::move(shape), std::move(values)));
  }
  return out;
}

void assign_parameters(const Module& target, const NamedTensors& values) {
  std::map<std::string_view, const Tensor*> by_name;
  for (const auto& [n, t] : values) by_name.emplace(n, &t);
  for (auto [name, param] : target.named_parameters()) {
    auto it = by_name.find(name);
    if (it == by_name.end()) throw Error(ErrorCode::CorruptFile, "missing parameter '" + name + "'");
    const Tensor& src = *it->second;
    if (src.shape() != param.shape()) {
      throw Error(ErrorCode::ShapeMismatch, "parameter '" + name + "' is " + shape_str(param.shape()) +
                                                ", stored " + shape_str(src.shape()));
    }
    std::copy(src.data().begin(), src.data().end(), param.data().begin());
  }
}

std::vector<std::uint8_t> save_module(const Module& m) {
  binio::Container c;
  c.version = kModuleVersion;
  const std::string spec = m.build_spec().dump();
  c.sections.emplace_back("spec", std::vector<std::uint8_t>(spec.begin(), spec.end()));
  binio::ByteWriter w;
  write_tensors(w, m.named_parameters());
  c.sections.emplace_back("params", w.take());
  return binio::write_container(kModuleMagic, c, binio::CrcPlacement::Header);
}

std::shared_ptr<Module> load_module(std::span<const std::uint8_t> bytes) {
  const auto c = binio::read_container(bytes, kModuleMagic, binio::CrcPlacement::Header,
                                       kModuleVersion, ErrorCode::CorruptFile,
                                       ErrorCode::VersionMismatch);
  const auto& spec_bytes = c.at("spec", ErrorCode::CorruptFile);
  json spec;
  try {
    spec = json::parse(spec_bytes.begin(), spec_bytes.end());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::CorruptFile, std::string("module spec: ") + e.what());
  }
  auto m = make_module(spec, nullptr);
  binio::ByteReader r(c.at("params", ErrorCode::CorruptFile), ErrorCode::CorruptFile);
  assign_parameters(*m, read_tensors(r));
  return m;
}

void load_pretrained_embeddings(const std::filesystem::path& path, const Vocabulary& vocab,
                                Tensor& table) {
  if (table.rank() != 2 || table.dim(0) != static_cast<std::int64_t>(vocab.size())) {
    throw Error(ErrorCode::ShapeMismatch, "embedding table " + shape_str(table.shape()) +
                                              " does not match vocabulary size " +
                                              std::to_string(vocab.size()));
  }
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::FileNotFound, "cannot open pretrained embeddings " + path.string());
  const auto d = table.dim(1);
  auto data = table.data();
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = split_ws(line);
    if (fields.empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    if (first) {
      first = false;
      std::int64_t a = 0, b = 0;
      if (fields.size() == 2 && d != 1 && parse_number(fields[0], a) && parse_number(fields[1], b)) {
        if (b != d) {
          throw Error(ErrorCode::DimMismatch, where + ": file dim " + std::to_string(b) +
                                                  ", configured " + std::to_string(d));
        }
        continue;  // word2vec header
      }
      if (static_cast<std::int64_t>(fields.size()) - 1 != d) {
        throw Error(ErrorCode::DimMismatch, where + ": file dim " + std::to_string(fields.size() - 1) +
                                                ", configured " + std::to_string(d));
      }
    }
    if (static_cast<std::int64_t>(fields.size()) - 1 != d) {
      throw Error(ErrorCode::MalformedLine, where + ": expected " + std::to_string(d) +
                                                " values, got " + std::to_string(fields.size() - 1));
    }
    std::vector<float> row(static_cast<std::size_t>(d));
    for (std::int64_t k = 0; k < d; ++k) {
      if (!parse_number(fields[static_cast<std::size_t>(k) + 1], row[static_cast<std::size_t>(k)])) {
        throw Error(ErrorCode::MalformedLine, where + ": bad number '" + fields[k + 1] + "'");
      }
    }
    const auto id = vocab.find(fields[0]);
    if (!id || *id == Vocabulary::kPadId || *id == Vocabulary::kUnkId) continue;
    std::copy(row.begin(), row.end(), data.begin() + *id * d);
  }
  std::fill(data.begin(), data.begin() + d, 0.0f);
}

}  // namespace textforge
