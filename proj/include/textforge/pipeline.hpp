// Copyright 2026 The TextForge Authors.
// SPDX-License-Identifier: Apache-2.0

// A task config turned into live components.

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "textforge/data_handler.hpp"
#include "textforge/models.hpp"
#include "textforge/optimizer.hpp"
#include "textforge/registry.hpp"

namespace textforge {

struct DataSourceSpec {
  TaskHead head = TaskHead::Doc;
  LabelFormat format = LabelFormat::Single;
  std::filesystem::path train_path, eval_path, test_path;
  int min_freq = 1;
};

struct TrainerSettings {
  std::int64_t epochs = 10;
  std::int64_t batch_size = 16;
  std::uint64_t seed = 0;
  std::int64_t patience = 0;  // 0: never stop early
  double max_grad_norm = 0.0;  // 0: no clipping
};

struct ExportSettings {
  std::string export_path = "model.txgr";
  bool bake_vocab = true;
};

struct SourceData {
  Dataset train, eval;
  std::optional<Dataset> test;
};

struct Pipeline {
  TaskConfig config;
  FeaturizerSettings featurizer;
  std::vector<DataSourceSpec> sources;  // task id == index
  Vocabs vocabs;
  std::shared_ptr<TaskModel> model;
  std::unique_ptr<Optimizer> optimizer;
  TrainerSettings trainer;
  std::string metric_reporter;
  ExportSettings exporter;
  std::filesystem::path base_dir;
};

FeaturizerSettings featurizer_settings(const ComponentConfig& cfg);
std::vector<DataSourceSpec> data_source_specs(const TaskConfig& config,
                                              const std::filesystem::path& base_dir);

/// Loads every split of every source. The test split is read only when
/// `include_test` is set and a path is configured.
std::vector<SourceData> load_sources(const std::vector<DataSourceSpec>& sources,
                                     const FeaturizerSettings& settings, bool include_test = false);

/// Token/char/gazetteer vocabularies from the training splits; label sets
/// from training and evaluation splits.
Vocabs build_pipeline_vocabs(const std::vector<SourceData>& data, const std::vector<DataSourceSpec>& sources);

struct InstantiateOptions {
  std::optional<std::uint64_t> seed_override;
  std::filesystem::path base_dir;
  /// When false, parameters start at zero and no pretrained file is read
  /// (used when a checkpoint supplies the parameters).
  bool initialize = true;
};

/// Wires all components around existing vocabularies. Parameter
/// initialization draws from a stream derived from the trainer seed.
Pipeline instantiate_task(const TaskConfig& config, Vocabs vocabs, const InstantiateOptions& opts = {});

/// Loads the data first to build the vocabularies.
Pipeline instantiate_task(const TaskConfig& config, const InstantiateOptions& opts = {});

/// Stream ids for Rng::derive.
inline constexpr std::uint64_t kInitStream = 1;
inline std::uint64_t shuffle_stream(std::int64_t epoch, std::size_t source) {
  return 1000 + static_cast<std::uint64_t>(epoch) * 16 + source;
}

/// Single-example batch for inference on raw text.
Batch make_text_batch(std::string_view text, const std::vector<GazetteerEntry>& entries,
                      const Vocabs& vocabs, const FeaturizerSettings& settings);

/// Ids for already-split tokens: no normalization, capitalization from the
/// given strings, no gazetteer.
NumericExample numericalize_tokens(const std::vector<std::string>& tokens, const Vocabs& vocabs,
                                   const FeaturizerSettings& settings);

/// Single-example batch from already-split tokens (normalization is the
/// caller's business; capitalization is computed on the given strings).
Batch make_token_batch(const std::vector<std::string>& tokens, const Vocabs& vocabs,
                       const FeaturizerSettings& settings);

}  // namespace textforge
