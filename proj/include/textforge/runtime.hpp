// Copyright 2026 The TextForge Authors.
// SPDX-License-Identifier: Apache-2.0

// Single-example interpreter for StaticGraph.

#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "textforge/data_handler.hpp"
#include "textforge/featurizer.hpp"
#include "textforge/graph.hpp"
#include "textforge/models.hpp"
#include "textforge/vocab.hpp"

namespace textforge {

struct GraphPrediction {
  std::vector<std::int32_t> labels;  // doc: one; word: one per real token
  std::vector<std::string> label_names;
  std::vector<float> scores;  // labels.size() x num_classes probabilities
  std::int64_t num_classes = 0;
};

/// Per-call working memory. Buffers keep their capacity between calls, so a
/// reused Scratch stops allocating once it has seen the largest input.
struct Scratch {
  std::vector<std::vector<float>> f;
  std::vector<std::vector<std::int32_t>> i;
  std::vector<std::vector<std::int64_t>> shape;
  std::vector<const std::vector<std::string>*> strings;
  std::vector<float> tmp_a, tmp_b;
  std::vector<std::int64_t> lengths;
};

class GraphRunner {
 public:
  /// Validates the graph (CorruptGraph on failure).
  explicit GraphRunner(StaticGraph graph);

  const StaticGraph& graph() const { return graph_; }
  HeadKind head() const { return head_; }
  const std::vector<std::string>& labels() const { return labels_; }
  const FeaturizerSettings& featurizer() const { return settings_; }
  bool baked() const { return graph_.baked(); }

  /// Raw text through the embedded featurizer settings. Baked graphs only.
  GraphPrediction run_text(std::string_view text, const std::vector<GazetteerEntry>& entries = {},
                           Scratch* scratch = nullptr) const;
  /// Pre-split tokens, used as given. Baked graphs only.
  GraphPrediction run_tokens(const std::vector<std::string>& tokens, Scratch* scratch = nullptr) const;
  /// Numericalized input. Id graphs only.
  GraphPrediction run_ids(const NumericExample& ids, Scratch* scratch = nullptr) const;

 private:
  struct Step {
    Opcode opcode;
    std::vector<int> in;
    int out;
    std::vector<std::int64_t> attrs;
  };

  GraphPrediction run_strings(const std::vector<std::string>& tokens, const std::vector<std::string>& caps,
                              const std::vector<std::string>& gaz, Scratch* scratch) const;
  GraphPrediction execute(Scratch& s, std::int64_t n) const;
  void prepare(Scratch& s) const;
  int slot(std::string_view name) const;  // -1 when absent

  StaticGraph graph_;
  HeadKind head_ = HeadKind::Doc;
  std::vector<std::string> labels_;
  FeaturizerSettings settings_;
  std::vector<std::string> slot_names_;
  std::vector<SlotInfo> slot_info_;
  std::vector<const GraphConst*> consts_;  // by slot
  std::vector<std::unique_ptr<Vocabulary>> vocabs_;  // by slot
  std::vector<Step> steps_;
  int labels_slot_ = -1, scores_slot_ = -1;
};

struct EquivalenceReport {
  std::size_t samples = 0;
  double max_abs_deviation = 0.0;
  bool argmax_agree = true;
  bool passed = false;
};

/// Runs `n_samples` examples drawn from `pool` plus `n_samples` random token
/// sequences (with OOV tokens) through the eager head and the graph, and
/// compares softmax scores. Throws EmptySampleSet when n_samples is 0.
EquivalenceReport verify_equivalence(const SingleTaskModel& model, const GraphRunner& graph,
                                     const Vocabs& vocabs, std::span<const Example> pool,
                                     std::size_t n_samples, double tol, std::uint64_t seed = 0);

}  // namespace textforge
