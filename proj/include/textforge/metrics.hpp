// Copyright 2026 The TextForge Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "textforge/tensor.hpp"

namespace textforge {

struct ClassStats {
  std::string label;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::int64_t support = 0;

  bool operator==(const ClassStats&) const = default;
};

/// Evaluation summary. per_class lists classes seen in gold or predictions,
/// in label-id order; 0/0 ratios are 0.
struct MetricReport {
  std::string task;  // "doc", "word" or "joint"
  std::int64_t total = 0;
  double accuracy = 0.0;
  std::vector<ClassStats> per_class;
  double macro_f1 = 0.0;
  std::optional<double> frame_accuracy;

  nlohmann::json to_json() const;
  std::string to_table() const;
  bool operator==(const MetricReport&) const = default;
};

/// `labels[i]` names class id i; ids past the end are printed numerically.
MetricReport doc_metrics(std::span<const std::int32_t> preds, std::span<const std::int32_t> golds,
                         const std::vector<std::string>& labels);

/// Token-level scores over positions with mask 1. preds/golds are [n, t].
MetricReport word_metrics(const IdTensor& preds, const IdTensor& golds,
                          std::span<const std::uint8_t> mask, const std::vector<std::string>& labels);

/// Fraction of examples whose doc label and every unmasked word label are
/// all correct.
double frame_accuracy(std::span<const std::int32_t> doc_preds, std::span<const std::int32_t> doc_golds,
                      const IdTensor& word_preds, const IdTensor& word_golds,
                      std::span<const std::uint8_t> mask);

}  // namespace textforge
