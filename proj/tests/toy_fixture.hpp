// Copyright 2026 The TextForge Authors.
// SPDX-License-Identifier: Apache-2.0

// Toy workspace loading shared by the trainer, exporter and acceptance tests.

#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "textforge/pipeline.hpp"
#include "textforge/registry.hpp"
#include "textforge/synthetic.hpp"
#include "textforge/trainer.hpp"

namespace tf_test {

struct LoadedTask {
  textforge::Pipeline pipeline;
  std::vector<textforge::SourceData> data;
};

/// Loads `<dir>/<config>` and applies `patch` (a JSON merge patch) first.
inline LoadedTask load_toy_task(const std::filesystem::path& dir, const std::string& config,
                                const nlohmann::json& patch = nlohmann::json::object(),
                                std::optional<std::uint64_t> seed = std::nullopt) {
  std::ifstream in(dir / config);
  nlohmann::json doc = nlohmann::json::parse(in);
  doc.merge_patch(patch);
  const auto cfg = textforge::parse_task_config(doc.dump());
  const auto specs = textforge::data_source_specs(cfg, dir);
  const auto settings = textforge::featurizer_settings(cfg.featurizer());
  LoadedTask t;
  t.data = textforge::load_sources(specs, settings, true);
  textforge::InstantiateOptions opts;
  opts.base_dir = dir;
  opts.seed_override = seed;
  t.pipeline = textforge::instantiate_task(cfg, textforge::build_pipeline_vocabs(t.data, specs), opts);
  return t;
}

/// Loads a toy config and trains it for `epochs` epochs.
inline LoadedTask train_toy_task(const std::filesystem::path& dir, const std::string& config, int epochs) {
  std::ifstream in(dir / config);
  const auto task_name = nlohmann::json::parse(in)["task"].begin().key();
  nlohmann::json patch = {{"task", {{task_name, {{"trainer", {{"trainer", {{"epochs", epochs}}}}}}}}}};
  LoadedTask t = load_toy_task(dir, config, patch);
  textforge::Trainer trainer(t.pipeline, t.data);
  trainer.train();
  return t;
}

/// Merge patch reaching into the single-task model of a config.
inline nlohmann::json model_patch(const std::string& task, const std::string& model, nlohmann::json body) {
  return {{"task", {{task, {{"model", {{model, std::move(body)}}}}}}}};
}

}  // namespace tf_test
