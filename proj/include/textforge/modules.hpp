// Copyright 2026 The TextForge Authors.
// SPDX-License-Identifier: Apache-2.0

// Layer modules: token embedding, representations, decoder, output layers.

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "textforge/binio.hpp"
#include "textforge/ops.hpp"
#include "textforge/rng.hpp"
#include "textforge/tensor.hpp"

namespace textforge {

class Vocabulary;

using NamedTensors = std::vector<std::pair<std::string, Tensor>>;

/// Base of every layer. Parameters and children are named; copies of a
/// shared_ptr<Module> share parameters, which is how multi-task models share
/// layers.
class Module {
 public:
  virtual ~Module() = default;

  virtual std::string type_name() const = 0;
  /// Everything needed to rebuild a module with identical shapes
  /// (includes "type"). Two modules may be shared iff their specs are equal.
  virtual nlohmann::json build_spec() const = 0;

  const NamedTensors& own_params() const { return params_; }
  const std::vector<std::pair<std::string, std::shared_ptr<Module>>>& children() const {
    return children_;
  }

  /// Dotted path lookup ("representation.lstm"); nullptr when absent.
  std::shared_ptr<Module> child(std::string_view path) const;
  void replace_child(std::string_view path, std::shared_ptr<Module> replacement);

  /// Unique parameters in registration order, named by dotted path. A tensor
  /// reachable through several paths is listed once, under its first path.
  NamedTensors named_parameters() const;
  std::int64_t parameter_count() const;

 protected:
  Tensor add_param(std::string name, Shape shape);
  void add_child(std::string name, std::shared_ptr<Module> m);
  const Tensor& param(std::string_view name) const;
  template <typename T>
  const T& child_as(std::string_view name) const {
    return dynamic_cast<const T&>(*child(name));
  }

 private:
  void collect(const std::string& prefix, NamedTensors& out,
               std::vector<const detail::TensorImpl*>& seen) const;

  NamedTensors params_;
  std::vector<std::pair<std::string, std::shared_ptr<Module>>> children_;
};

/// uniform(-sqrt(1/fan_in), +sqrt(1/fan_in)).
void init_fan_in(Tensor& t, std::int64_t fan_in, Rng* rng);
void init_uniform(Tensor& t, float bound, Rng* rng);

struct TokenEmbeddingSpec {
  std::int64_t word_vocab = 0, word_dim = 0;
  std::int64_t char_vocab = 0, char_dim = 0, char_filters = 0, max_chars = 0;
  std::vector<std::int64_t> char_widths;
  std::int64_t highway_layers = 0;
  std::int64_t cap_vocab = 0, cap_dim = 0;
  std::int64_t gaz_vocab = 0, gaz_dim = 0;

  bool uses_words() const { return word_dim > 0; }
  bool uses_chars() const { return char_dim > 0; }
  bool uses_caps() const { return cap_dim > 0; }
  bool uses_gazetteer() const { return gaz_dim > 0; }
  std::int64_t char_output_dim() const {
    return uses_chars() ? char_filters * static_cast<std::int64_t>(char_widths.size()) : 0;
  }
  std::int64_t output_dim() const { return word_dim + char_output_dim() + cap_dim + gaz_dim; }

  nlohmann::json to_json() const;
  static TokenEmbeddingSpec from_json(const nlohmann::json& j);
};

/// Concatenation of the selected embedding styles, in the order
/// word | char-CNN + highway | capitalization | gazetteer.
class TokenEmbedding : public Module {
 public:
  TokenEmbedding(TokenEmbeddingSpec spec, Rng* rng);

  std::string type_name() const override { return "token_embedding"; }
  nlohmann::json build_spec() const override { return spec_.to_json(); }
  const TokenEmbeddingSpec& spec() const { return spec_; }
  std::int64_t output_dim() const { return spec_.output_dim(); }

  /// ids [b, t] (chars [b, t, max_chars]) -> [b, t, e].
  Tensor forward(const IdTensor& token_ids, const IdTensor& char_ids, const IdTensor& cap_ids,
                 const IdTensor& gaz_ids) const;
  /// Char-CNN + highway part alone: [b, t, max_chars] -> [b, t, filters * widths].
  Tensor char_forward(const IdTensor& char_ids) const;

  /// Per-token char lengths for the char convolution: max(1, #non-PAD ids).
  static std::vector<std::int64_t> char_lengths(const IdTensor& char_ids);

 private:
  TokenEmbeddingSpec spec_;
};

/// Highway layer: y = g * relu(W1 x + b1) + (1 - g) * x, g = sigmoid(W2 x + b2),
/// evaluated as x + g * (h - x).
Tensor highway(const Tensor& x, const Tensor& w1, const Tensor& b1, const Tensor& w2,
               const Tensor& b2);

/// Representation: [b, t, e] -> [b, r] (pooled) or [b, t, r] (per token).
class Representation : public Module {
 public:
  virtual Tensor forward(const Tensor& x, ops::Lengths lengths) const = 0;
  virtual std::int64_t input_dim() const = 0;
  virtual std::int64_t output_dim() const = 0;
  virtual bool per_token() const = 0;
};

/// Kim-style CNN: per width, conv + bias + relu + max over time; concat.
class DocNN : public Representation {
 public:
  DocNN(std::int64_t input_dim, std::int64_t kernel_num, std::vector<std::int64_t> widths, Rng* rng);
  std::string type_name() const override { return "docnn"; }
  nlohmann::json build_spec() const override;
  Tensor forward(const Tensor& x, ops::Lengths lengths) const override;
  std::int64_t input_dim() const override { return input_dim_; }
  std::int64_t output_dim() const override {
    return kernel_num_ * static_cast<std::int64_t>(widths_.size());
  }
  bool per_token() const override { return false; }
  const std::vector<std::int64_t>& widths() const { return widths_; }

 private:
  std::int64_t input_dim_, kernel_num_;
  std::vector<std::int64_t> widths_;
};

/// Forward and backward LSTM, states concatenated: [b, t, e] -> [b, t, 2h].
class BiLSTM : public Representation {
 public:
  BiLSTM(std::int64_t input_dim, std::int64_t hidden_dim, Rng* rng);
  std::string type_name() const override { return "bilstm"; }
  nlohmann::json build_spec() const override;
  Tensor forward(const Tensor& x, ops::Lengths lengths) const override;
  std::int64_t input_dim() const override { return input_dim_; }
  std::int64_t output_dim() const override { return 2 * hidden_dim_; }
  std::int64_t hidden_dim() const { return hidden_dim_; }
  bool per_token() const override { return true; }

 private:
  std::int64_t input_dim_, hidden_dim_;
};

/// Single-head additive self-attention pooling: [b, t, h] -> [b, h].
class SelfAttention : public Module {
 public:
  SelfAttention(std::int64_t input_dim, std::int64_t attention_dim, Rng* rng);
  std::string type_name() const override { return "self_attention"; }
  nlohmann::json build_spec() const override;
  Tensor forward(const Tensor& hs, ops::Lengths lengths) const;
  std::int64_t input_dim() const { return input_dim_; }

 private:
  std::int64_t input_dim_, attention_dim_;
};

/// BiLSTM followed by self-attention pooling. Children: lstm, attention.
class BiLSTMAttn : public Representation {
 public:
  BiLSTMAttn(std::int64_t input_dim, std::int64_t hidden_dim, std::int64_t attention_dim, Rng* rng);
  std::string type_name() const override { return "bilstm_attn"; }
  nlohmann::json build_spec() const override;
  Tensor forward(const Tensor& x, ops::Lengths lengths) const override;
  std::int64_t input_dim() const override { return input_dim_; }
  std::int64_t output_dim() const override { return 2 * hidden_dim_; }
  bool per_token() const override { return false; }

 private:
  std::int64_t input_dim_, hidden_dim_, attention_dim_;
};

/// Per-token BiLSTM states. Child: lstm.
class BiLSTMTagger : public Representation {
 public:
  BiLSTMTagger(std::int64_t input_dim, std::int64_t hidden_dim, Rng* rng);
  std::string type_name() const override { return "bilstm_tagger"; }
  nlohmann::json build_spec() const override;
  Tensor forward(const Tensor& x, ops::Lengths lengths) const override;
  std::int64_t input_dim() const override { return input_dim_; }
  std::int64_t output_dim() const override { return 2 * hidden_dim_; }
  bool per_token() const override { return true; }

 private:
  std::int64_t input_dim_, hidden_dim_;
};

/// Hidden affine + relu layers, then a final affine to `num_classes` logits.
class MlpDecoder : public Module {
 public:
  MlpDecoder(std::int64_t input_dim, std::vector<std::int64_t> hidden_dims, std::int64_t num_classes,
             Rng* rng);
  std::string type_name() const override { return "mlp"; }
  nlohmann::json build_spec() const override;
  /// [..., input_dim] -> [..., num_classes].
  Tensor forward(const Tensor& x) const;
  std::int64_t input_dim() const { return input_dim_; }
  std::int64_t num_classes() const { return num_classes_; }
  const std::vector<std::int64_t>& hidden_dims() const { return hidden_dims_; }

 private:
  std::int64_t input_dim_, num_classes_;
  std::vector<std::int64_t> hidden_dims_;
};

/// Output layers hold no parameters; they name how logits become
/// predictions and a loss.
class ClassificationOutput : public Module {
 public:
  std::string type_name() const override { return "classification_output"; }
  nlohmann::json build_spec() const override { return {{"type", type_name()}}; }
};

class WordTaggingOutput : public Module {
 public:
  std::string type_name() const override { return "word_tagging_output"; }
  nlohmann::json build_spec() const override { return {{"type", type_name()}}; }
};

/// Index of the largest value; ties go to the lowest index.
std::int32_t argmax(std::span<const float> row);

/// Builds a layer module from its build spec. Parameters are initialized from
/// `rng`, or zeroed when rng is null.
std::shared_ptr<Module> make_module(const nlohmann::json& spec, Rng* rng);

void write_tensors(binio::ByteWriter& w, const NamedTensors& tensors);
NamedTensors read_tensors(binio::ByteReader& r);
/// Copies values by name into `target`'s parameters. Every parameter must be
/// present with the same shape (CorruptFile / ShapeMismatch otherwise).
void assign_parameters(const Module& target, const NamedTensors& values);

/// Individual module persistence: spec + parameters in a small container.
std::vector<std::uint8_t> save_module(const Module& m);
std::shared_ptr<Module> load_module(std::span<const std::uint8_t> bytes);

/// Reads word2vec-style text ("token v1 ... vd" per line, optional
/// "count dim" header) into the rows of `table` [V, d] for in-vocab tokens;
/// other rows are left as they are and the PAD row is zeroed.
void load_pretrained_embeddings(const std::filesystem::path& path, const Vocabulary& vocab,
                                Tensor& table);

}  // namespace textforge
