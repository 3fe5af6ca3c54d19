// Copyright 2026 The TextForge Authors.
// SPDX-License-Identifier: Apache-2.0

#include "textforge/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <map>

#include "textforge/error.hpp"

namespace textforge {
namespace {

double ratio(std::int64_t num, std::int64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

std::string label_name(const std::vector<std::string>& labels, std::int32_t id) {
  if (id >= 0 && static_cast<std::size_t>(id) < labels.size()) return labels[static_cast<std::size_t>(id)];
  return std::to_string(id);
}

MetricReport score(const std::vector<std::pair<std::int32_t, std::int32_t>>& pairs,
                   const std::vector<std::string>& labels, std::string task) {
  if (pairs.empty()) throw Error(ErrorCode::EmptyEval, "nothing to evaluate");
  struct Counts {
    std::int64_t tp = 0, pred = 0, gold = 0;
  };
  std::map<std::int32_t, Counts> counts;
  std::int64_t correct = 0;
  for (const auto& [p, g] : pairs) {
    ++counts[p].pred;
    ++counts[g].gold;
    if (p == g) {
      ++counts[g].tp;
      ++correct;
    }
  }
  MetricReport r;
  r.task = std::move(task);
  r.total = static_cast<std::int64_t>(pairs.size());
  r.accuracy = ratio(correct, r.total);
  double f1_sum = 0.0;
  for (const auto& [id, c] : counts) {
    ClassStats s;
    s.label = label_name(labels, id);
    s.precision = ratio(c.tp, c.pred);
    s.recall = ratio(c.tp, c.gold);
    s.f1 = s.precision + s.recall == 0.0 ? 0.0
                                         : 2.0 * s.precision * s.recall / (s.precision + s.recall);
    s.support = c.gold;
    f1_sum += s.f1;
    r.per_class.push_back(std::move(s));
  }
  r.macro_f1 = f1_sum / static_cast<double>(r.per_class.size());
  return r;
}

void check_word_shapes(const IdTensor& preds, const IdTensor& golds, std::span<const std::uint8_t> mask) {
  if (preds.shape != golds.shape || mask.size() != golds.data.size()) {
    throw Error(ErrorCode::LengthMismatch, "word predictions " + shape_str(preds.shape) + ", gold " +
                                               shape_str(golds.shape) + ", mask " +
                                               std::to_string(mask.size()));
  }
}

}  // namespace

MetricReport doc_metrics(std::span<const std::int32_t> preds, std::span<const std::int32_t> golds,
                         const std::vector<std::string>& labels) {
  if (preds.size() != golds.size()) {
    throw Error(ErrorCode::LengthMismatch, std::to_string(preds.size()) + " predictions for " +
                                               std::to_string(golds.size()) + " gold labels");
  }
  std::vector<std::pair<std::int32_t, std::int32_t>> pairs;
  pairs.reserve(preds.size());
  for (std::size_t i = 0; i < preds.size(); ++i) pairs.emplace_back(preds[i], golds[i]);
  return score(pairs, labels, "doc");
}

MetricReport word_metrics(const IdTensor& preds, const IdTensor& golds,
                          std::span<const std::uint8_t> mask, const std::vector<std::string>& labels) {
  check_word_shapes(preds, golds, mask);
  std::vector<std::pair<std::int32_t, std::int32_t>> pairs;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) pairs.emplace_back(preds.data[i], golds.data[i]);
  }
  return score(pairs, labels, "word");
}

double frame_accuracy(std::span<const std::int32_t> doc_preds, std::span<const std::int32_t> doc_golds,
                      const IdTensor& word_preds, const IdTensor& word_golds,
                      std::span<const std::uint8_t> mask) {
  check_word_shapes(word_preds, word_golds, mask);
  const auto n = static_cast<std::int64_t>(doc_golds.size());
  if (doc_preds.size() != doc_golds.size() || (n > 0 && word_golds.dim(0) != n)) {
    throw Error(ErrorCode::LengthMismatch, "doc and word evaluations cover different examples");
  }
  if (n == 0) throw Error(ErrorCode::EmptyEval, "nothing to evaluate");
  const auto T = word_golds.shape.size() > 1 ? word_golds.dim(1) : 0;
  std::int64_t correct = 0;
  for (std::int64_t i = 0; i < n; ++i) {
    bool ok = doc_preds[i] == doc_golds[i];
    for (std::int64_t t = 0; ok && t < T; ++t) {
      const auto k = static_cast<std::size_t>(i * T + t);
      ok = !mask[k] || word_preds.data[k] == word_golds.data[k];
    }
    correct += ok ? 1 : 0;
  }
  return ratio(correct, n);
}

nlohmann::json MetricReport::to_json() const {
  nlohmann::json classes = nlohmann::json::array();
  for (const auto& c : per_class) {
    classes.push_back({{"label", c.label},
                       {"precision", c.precision},
                       {"recall", c.recall},
                       {"f1", c.f1},
                       {"support", c.support}});
  }
  nlohmann::json j = {{"task", task},         {"total", total},          {"accuracy", accuracy},
                      {"per_class", classes}, {"macro_f1", macro_f1}};
  if (frame_accuracy) j["frame_accuracy"] = *frame_accuracy;
  return j;
}

std::string MetricReport::to_table() const {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof line, "%-20s %9s %9s %9s %9s\n", "label", "precision", "recall", "f1",
                "support");
  out += line;
  for (const auto& c : per_class) {
    std::snprintf(line, sizeof line, "%-20s %9.4f %9.4f %9.4f %9lld\n", c.label.c_str(), c.precision,
                  c.recall, c.f1, static_cast<long long>(c.support));
    out += line;
  }
  std::snprintf(line, sizeof line, "accuracy %.4f  macro_f1 %.4f  n %lld\n", accuracy, macro_f1,
                static_cast<long long>(total));
  out += line;
  if (frame_accuracy) {
    std::snprintf(line, sizeof line, "frame_accuracy %.4f\n", *frame_accuracy);
    out += line;
  }
  return out;
}

}  // namespace textforge
