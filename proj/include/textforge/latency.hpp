// Copyright 2026 The TextForge Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "textforge/runtime.hpp"

namespace textforge {

struct LatencyReport {
  std::string implementation;  // "eager" or "exported"
  std::int64_t n_requests = 0;
  double p50_ms = 0.0, p90_ms = 0.0, p99_ms = 0.0;
  std::string machine_note;

  nlohmann::json to_json() const;
};

/// ceil(percent/100 * n)-th order statistic (1-based) of `samples`.
/// Integer arithmetic, so 90% of 100 samples is exactly the 90th.
double nearest_rank(std::vector<double> samples, int percent);

LatencyReport summarize_latencies(std::string implementation, const std::vector<double>& ms,
                                  std::string machine_note = {});

/// Reference point quoted next to local measurements.
inline constexpr double kReferenceEagerP50Ms = 34.08;
inline constexpr double kReferenceExportedP50Ms = 19.65;

struct BenchResult {
  LatencyReport eager, exported;

  nlohmann::json to_json() const;
  std::string to_text() const;
};

/// Times single-example inference on the same input sequence for the eager
/// head (gradient tape on) and the graph. `inputs` are raw text lines, used
/// round-robin. Warmup calls are not timed.
BenchResult run_latency_bench(const SingleTaskModel& model, const GraphRunner& graph, const Vocabs& vocabs,
                              const std::vector<std::string>& inputs, std::int64_t requests,
                              std::int64_t warmup);

std::string machine_note();

}  // namespace textforge
