// Copyright 2026 The TextForge Authors.
// SPDX-License-Identifier: Apache-2.0

// Checkpoint file: magic "TXFG", u32 version, u32 crc32 of the body, then
// named sections (config, vocabs, params, best_params, optimizer, state).

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "textforge/modules.hpp"
#include "textforge/vocab.hpp"

namespace textforge {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct EpochRecord {
  std::int64_t epoch = 0;
  double train_loss = 0.0;
  double metric = 0.0;  // model-selection metric on the eval split
  nlohmann::json eval;  // full evaluation report

  bool operator==(const EpochRecord&) const = default;
};

struct Checkpoint {
  std::string config;  // task config snapshot (JSON text)
  Vocabs vocabs;
  NamedTensors params;       // parameters after the last completed epoch
  NamedTensors best_params;  // empty until an epoch has been evaluated
  std::vector<std::uint8_t> optimizer_state;
  std::int64_t epoch = 0;  // completed epochs
  std::optional<double> best_metric;
  std::int64_t best_epoch = -1;
  std::int64_t epochs_without_improvement = 0;
  std::vector<EpochRecord> history;
};

std::vector<std::uint8_t> serialize_checkpoint(const Checkpoint& c);
/// Throws CorruptFile (magic, checksum, truncation) or VersionMismatch.
Checkpoint deserialize_checkpoint(std::span<const std::uint8_t> bytes);

void save_checkpoint(const Checkpoint& c, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

nlohmann::json history_to_json(const std::vector<EpochRecord>& history);

}  // namespace textforge
