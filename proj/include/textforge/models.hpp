// Copyright 2026 The TextForge Authors.
// SPDX-License-Identifier: Apache-2.0

// Reference models built from the four-layer decomposition, and the joint
// document + word model with shared modules.

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "textforge/data_handler.hpp"
#include "textforge/modules.hpp"
#include "textforge/registry.hpp"

namespace textforge {

enum class HeadKind { Doc, Word };
std::string_view head_kind_name(HeadKind k);

/// Model-side view of a batch. A batch whose longest example is empty is
/// widened to one PAD step; every effective length is max(1, length), so an
/// empty example is modelled as a single PAD token.
struct ModelInputs {
  IdTensor token_ids, char_ids, cap_ids, gaz_ids;
  std::vector<std::int64_t> lengths;
};
ModelInputs prepare_inputs(const Batch& batch);

struct Prediction {
  std::vector<std::int32_t> labels;  // doc: one label; word: one per token
  std::vector<float> scores;         // softmax probabilities, labels.size() x num_classes
  std::int64_t num_classes = 0;
};

class SingleTaskModel;

/// Anything the trainer can optimize.
class TaskModel : public Module {
 public:
  /// Loss of the head owning `batch` (multi-task: batch.task_id).
  virtual Tensor loss(const Batch& batch) const = 0;
  virtual std::vector<HeadKind> heads() const = 0;
  virtual const SingleTaskModel& head(HeadKind kind) const = 0;
};

/// embedding -> representation -> decoder -> output.
class SingleTaskModel : public TaskModel {
 public:
  SingleTaskModel(HeadKind kind, std::shared_ptr<TokenEmbedding> embedding,
                  std::shared_ptr<Representation> representation,
                  std::shared_ptr<MlpDecoder> decoder, std::shared_ptr<Module> output);

  std::string type_name() const override { return "single_task_model"; }
  nlohmann::json build_spec() const override;

  HeadKind head_kind() const { return kind_; }
  const TokenEmbedding& embedding() const { return child_as<TokenEmbedding>("embedding"); }
  const Representation& representation() const {
    return child_as<Representation>("representation");
  }
  const MlpDecoder& decoder() const { return child_as<MlpDecoder>("decoder"); }
  const Module& output_layer() const { return *child("output"); }
  std::int64_t num_classes() const { return decoder().num_classes(); }

  /// doc: [b, c]; word: [b, t, c].
  Tensor logits(const Batch& batch) const;
  Tensor loss(const Batch& batch) const override;
  /// Tape-free; word predictions cover each example's real tokens only.
  std::vector<Prediction> predict(const Batch& batch) const;

  std::vector<HeadKind> heads() const override { return {kind_}; }
  const SingleTaskModel& head(HeadKind kind) const override;

 private:
  HeadKind kind_;
};

/// Doc and word heads; modules at `shared` paths are the same objects in
/// both. Children: doc, word.
class MultiTaskModel : public TaskModel {
 public:
  MultiTaskModel(std::shared_ptr<SingleTaskModel> doc, std::shared_ptr<SingleTaskModel> word,
                 std::vector<std::string> shared, std::vector<float> loss_weights);

  std::string type_name() const override { return "multi_task_model"; }
  nlohmann::json build_spec() const override;

  /// task_id 0 -> doc head, 1 -> word head; scaled by the task's weight.
  Tensor loss(const Batch& batch) const override;
  std::vector<HeadKind> heads() const override { return {HeadKind::Doc, HeadKind::Word}; }
  const SingleTaskModel& head(HeadKind kind) const override;
  const std::vector<std::string>& shared_paths() const { return shared_; }
  float loss_weight(int task) const { return loss_weights_.at(static_cast<std::size_t>(task)); }

 private:
  std::vector<std::string> shared_;
  std::vector<float> loss_weights_;
};

/// Makes `word` reference `doc`'s modules at every shared path. Throws
/// IncompatibleShare when a path is missing or the two build specs differ.
std::shared_ptr<MultiTaskModel> compose_multitask(std::shared_ptr<SingleTaskModel> doc,
                                                  std::shared_ptr<SingleTaskModel> word,
                                                  const std::vector<std::string>& shared,
                                                  std::vector<float> loss_weights);

struct ModelBuildContext {
  const Vocabs* vocabs = nullptr;
  int max_chars = 12;
  Rng* rng = nullptr;
  std::filesystem::path base_dir;  // resolves relative pretrained paths
  bool load_pretrained = true;     // off when parameters come from a checkpoint
};

/// From a doc_model / word_model config.
std::shared_ptr<SingleTaskModel> build_single_task_model(const ComponentConfig& cfg, HeadKind kind,
                                                         const ModelBuildContext& ctx);
std::shared_ptr<TaskModel> build_model(const ComponentConfig& model_cfg, TaskKind task,
                                       const ModelBuildContext& ctx);

}  // namespace textforge
