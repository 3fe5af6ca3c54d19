// Copyright 2026 The TextForge Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "textforge/checkpoint.hpp"
#include "textforge/metrics.hpp"
#include "textforge/pipeline.hpp"

namespace textforge {

/// Evaluation of every head on one split. `metric` drives model selection:
/// doc accuracy, word macro-F1, or their mean for the joint task.
struct EvalResult {
  std::optional<MetricReport> doc, word;
  std::optional<double> frame_accuracy;
  double metric = 0.0;

  nlohmann::json to_json() const;
};

struct TrainReport {
  std::vector<EpochRecord> history;
  std::int64_t best_epoch = -1;
  std::optional<double> best_metric;
  bool stopped_early = false;

  nlohmann::json to_json() const;
  std::string to_text() const;
};

/// Numericalized splits for every source, in task order.
struct NumericSources {
  std::vector<std::vector<NumericExample>> per_source;
};
NumericSources numericalize_sources(const std::vector<SourceData>& data, Split split,
                                    const Vocabs& vocabs, const FeaturizerSettings& settings);

EvalResult evaluate_model(const TaskModel& model, TaskKind task, const NumericSources& sources,
                          const std::vector<DataSourceSpec>& specs, const Vocabs& vocabs,
                          int max_chars, std::int64_t batch_size);

class Trainer {
 public:
  /// Throws EmptySplit when a train or eval split has no examples.
  Trainer(Pipeline& pipeline, const std::vector<SourceData>& data);

  using EpochCallback = std::function<void(const Checkpoint&)>;
  /// Runs the remaining epochs, then loads the best parameters into the model.
  TrainReport train(const EpochCallback& on_epoch = {}, std::ostream* log = nullptr);

  EvalResult evaluate() const;

  /// Snapshot for resuming: parameters as of the last completed epoch.
  Checkpoint checkpoint() const;
  /// Restores parameters, optimizer state and progress.
  void restore(const Checkpoint& c);

  std::int64_t completed_epochs() const { return epoch_; }

  /// Batches of one epoch in training order (multi-task: interleaved).
  std::vector<Batch> epoch_batches(std::int64_t epoch) const;

 private:
  Pipeline& p_;
  NumericSources train_, eval_;
  std::int64_t epoch_ = 0;
  std::optional<double> best_metric_;
  std::int64_t best_epoch_ = -1;
  std::int64_t stale_ = 0;
  std::vector<EpochRecord> history_;
  NamedTensors best_params_;
  NamedTensors current_params_;  // empty until an epoch completes
};

NamedTensors snapshot_parameters(const Module& m);

/// Rebuilds the pipeline stored in a checkpoint with its best parameters
/// (or the latest ones when no epoch has been evaluated). No data is read.
Pipeline pipeline_from_checkpoint(const Checkpoint& c, const std::filesystem::path& base_dir = {});

}  // namespace textforge
