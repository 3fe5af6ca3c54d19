// Copyright 2026 The TextForge Authors.
// SPDX-License-Identifier: Apache-2.0

#include "textforge/vocab.hpp"

#include <algorithm>

#include "textforge/error.hpp"
#include "textforge/featurizer.hpp"

namespace textforge {

Vocabulary::Vocabulary() : entries_{std::string(kPad), std::string(kUnk)} {
  index_.emplace(kPad, kPadId);
  index_.emplace(kUnk, kUnkId);
}

Vocabulary Vocabulary::from_counts(const std::map<std::string, std::int64_t>& counts,
                                   int min_freq) {
  std::vector<std::pair<std::string, std::int64_t>> kept;
  for (const auto& [tok, n] : counts) {
    if (n >= min_freq && tok != kPad && tok != kUnk) kept.emplace_back(tok, n);
  }
  std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  std::vector<std::string> entries{std::string(kPad), std::string(kUnk)};
  for (auto& [tok, n] : kept) entries.push_back(std::move(tok));
  return from_entries(std::move(entries), min_freq);
}

Vocabulary Vocabulary::from_entries(std::vector<std::string> entries, int min_freq) {
  if (entries.size() < 2 || entries[0] != kPad || entries[1] != kUnk) {
    throw Error(ErrorCode::CorruptFile, "vocabulary does not start with <pad>, <unk>");
  }
  Vocabulary v;
  v.entries_ = std::move(entries);
  v.min_freq_ = min_freq;
  v.index_.clear();
  for (std::size_t i = 0; i < v.entries_.size(); ++i) {
    if (!v.index_.emplace(v.entries_[i], static_cast<std::int32_t>(i)).second) {
      throw Error(ErrorCode::CorruptFile, "duplicate vocabulary entry '" + v.entries_[i] + "'");
    }
  }
  return v;
}

std::optional<std::int32_t> Vocabulary::find(std::string_view token) const {
  auto it = index_.find(token);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::int32_t Vocabulary::id(std::string_view token) const {
  auto it = index_.find(token);
  return it == index_.end() ? kUnkId : it->second;
}

std::vector<std::int32_t> Vocabulary::numericalize(std::span<const std::string> tokens) const {
  std::vector<std::int32_t> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(id(t));
  return ids;
}

void Vocabulary::write(binio::ByteWriter& w) const {
  w.i32(min_freq_);
  w.strs(entries_);
}

Vocabulary Vocabulary::read(binio::ByteReader& r) {
  const int min_freq = r.i32();
  return from_entries(r.strs(), min_freq);
}

LabelSet::LabelSet(std::vector<std::string> labels) : labels_(std::move(labels)) {
  std::sort(labels_.begin(), labels_.end());
  labels_.erase(std::unique(labels_.begin(), labels_.end()), labels_.end());
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    index_.emplace(labels_[i], static_cast<std::int32_t>(i));
  }
}

std::optional<std::int32_t> LabelSet::find(std::string_view label) const {
  auto it = index_.find(label);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::int32_t LabelSet::id(std::string_view label) const {
  if (auto v = find(label)) return *v;
  throw Error(ErrorCode::UnknownLabel, "unknown label '" + std::string(label) + "'");
}

void LabelSet::write(binio::ByteWriter& w) const { w.strs(labels_); }

LabelSet LabelSet::read(binio::ByteReader& r) { return LabelSet(r.strs()); }

void Vocabs::write(binio::ByteWriter& w) const {
  tokens.write(w);
  chars.write(w);
  caps.write(w);
  gazetteer.write(w);
  doc_labels.write(w);
  word_labels.write(w);
}

Vocabs Vocabs::read(binio::ByteReader& r) {
  Vocabs v;
  v.tokens = Vocabulary::read(r);
  v.chars = Vocabulary::read(r);
  v.caps = Vocabulary::read(r);
  v.gazetteer = Vocabulary::read(r);
  v.doc_labels = LabelSet::read(r);
  v.word_labels = LabelSet::read(r);
  return v;
}

Vocabulary capitalization_vocab() {
  std::vector<std::string> entries{std::string(Vocabulary::kPad), std::string(Vocabulary::kUnk)};
  for (auto c : {CapFeature::AllLower, CapFeature::InitCap, CapFeature::AllCaps, CapFeature::Other}) {
    entries.emplace_back(cap_feature_name(c));
  }
  return Vocabulary::from_entries(std::move(entries), 1);
}

}  // namespace textforge
