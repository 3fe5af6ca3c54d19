// Copyright 2026 The TextForge Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "textforge/binio.hpp"

namespace textforge {

struct StringHash {
  using is_transparent = void;
  std::size_t operator()(std::string_view s) const { return std::hash<std::string_view>{}(s); }
};

using StringIndex = std::unordered_map<std::string, std::int32_t, StringHash, std::equal_to<>>;

/// Ordered token <-> id map. Ids 0 and 1 are always "<pad>" and "<unk>".
class Vocabulary {
 public:
  static constexpr std::int32_t kPadId = 0;
  static constexpr std::int32_t kUnkId = 1;
  static constexpr std::string_view kPad = "<pad>";
  static constexpr std::string_view kUnk = "<unk>";

  Vocabulary();

  /// Specials first, then tokens with count >= min_freq ordered by
  /// descending count, ties broken lexicographically.
  static Vocabulary from_counts(const std::map<std::string, std::int64_t>& counts, int min_freq);

  /// Rebuilds from a stored entry list; entries[0..1] must be the specials.
  static Vocabulary from_entries(std::vector<std::string> entries, int min_freq);

  std::int32_t id(std::string_view token) const;
  std::optional<std::int32_t> find(std::string_view token) const;
  const std::string& token(std::int32_t id) const { return entries_.at(static_cast<std::size_t>(id)); }
  std::size_t size() const { return entries_.size(); }
  const std::vector<std::string>& entries() const { return entries_; }
  int min_freq() const { return min_freq_; }

  std::vector<std::int32_t> numericalize(std::span<const std::string> tokens) const;

  void write(binio::ByteWriter& w) const;
  static Vocabulary read(binio::ByteReader& r);

  bool operator==(const Vocabulary& o) const {
    return entries_ == o.entries_ && min_freq_ == o.min_freq_;
  }

 private:
  std::vector<std::string> entries_;
  StringIndex index_;
  int min_freq_ = 1;
};

/// Ordered label inventory (no specials). Ids are positions in `labels()`.
class LabelSet {
 public:
  LabelSet() = default;
  /// Sorted, de-duplicated.
  explicit LabelSet(std::vector<std::string> labels);

  std::int32_t id(std::string_view label) const;  // throws UnknownLabel
  std::optional<std::int32_t> find(std::string_view label) const;
  const std::string& label(std::int32_t id) const { return labels_.at(static_cast<std::size_t>(id)); }
  std::size_t size() const { return labels_.size(); }
  bool empty() const { return labels_.empty(); }
  const std::vector<std::string>& labels() const { return labels_; }

  void write(binio::ByteWriter& w) const;
  static LabelSet read(binio::ByteReader& r);

  bool operator==(const LabelSet& o) const { return labels_ == o.labels_; }

 private:
  std::vector<std::string> labels_;
  StringIndex index_;
};

/// Every vocabulary a pipeline needs, built together from the training data.
struct Vocabs {
  Vocabulary tokens;
  Vocabulary chars;
  Vocabulary caps;
  Vocabulary gazetteer;
  LabelSet doc_labels;
  LabelSet word_labels;

  void write(binio::ByteWriter& w) const;
  static Vocabs read(binio::ByteReader& r);
  bool operator==(const Vocabs&) const = default;
};

/// Capitalization classes as a vocabulary: specials then the four classes.
Vocabulary capitalization_vocab();

/// Token used for gazetteer-less positions in the gazetteer vocabulary.
inline constexpr std::string_view kNoGazetteer = "<none>";

}  // namespace textforge
