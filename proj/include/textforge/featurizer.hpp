// Copyright 2026 The TextForge Authors.
// SPDX-License-Identifier: Apache-2.0

// Raw text -> per-token features. The same code runs when the data handler
// prepares training batches and when the graph runtime serves a request.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace textforge {

class Vocabulary;

struct TokenSpan {
  std::string text;  // normalized token text
  std::size_t start = 0;
  std::size_t end = 0;  // exclusive byte offset into the original text

  bool operator==(const TokenSpan&) const = default;
};

struct GazetteerEntry {
  std::size_t start = 0;
  std::size_t end = 0;
  std::string kind;

  bool operator==(const GazetteerEntry&) const = default;
};

enum class CapFeature : std::uint8_t { AllLower, InitCap, AllCaps, Other };

std::string_view cap_feature_name(CapFeature c);
CapFeature cap_feature(std::string_view token);

struct FeaturizerSettings {
  bool lowercase = true;
  int max_chars = 12;

  bool operator==(const FeaturizerSettings&) const = default;
};

struct FeaturizedExample {
  std::vector<TokenSpan> tokens;
  std::vector<std::vector<std::int32_t>> char_ids;  // empty when no alphabet given
  std::vector<std::optional<std::string>> gazetteer_labels;
  std::vector<CapFeature> cap_features;
  std::string raw_text;

  bool operator==(const FeaturizedExample&) const = default;

  /// Canonical byte encoding, used to compare featurizations across paths.
  std::vector<std::uint8_t> to_bytes() const;
};

/// Splits on Unicode whitespace and emits every ASCII punctuation character
/// as its own token. Offsets always index `text`; only the token strings are
/// lowercased (ASCII letters) when `lowercase` is set.
std::vector<TokenSpan> tokenize(std::string_view text, bool lowercase);

/// Splits a token into UTF-8 characters (one string per code point; invalid
/// bytes become single-byte characters).
std::vector<std::string> utf8_chars(std::string_view token);

/// Row of `max_chars` character ids: UNK for unseen characters, PAD after the
/// token ends, overlong tokens truncated.
std::vector<std::int32_t> char_ids(std::string_view token, const Vocabulary& alphabet,
                                   int max_chars);

/// A token takes an entry's kind iff their byte spans overlap by >= 1 byte.
/// Entries must be sorted by start and non-overlapping.
std::vector<std::optional<std::string>> align_gazetteer(const std::vector<TokenSpan>& tokens,
                                                        const std::vector<GazetteerEntry>& entries);

/// Full featurization. `alphabet` may be null, in which case char_ids is left
/// empty (character ids are produced later, once an alphabet exists).
FeaturizedExample featurize(std::string_view text, const std::vector<GazetteerEntry>& entries,
                            const FeaturizerSettings& settings,
                            const Vocabulary* alphabet = nullptr);

/// Parses "start:end:kind,start:end:kind". Empty string -> no entries.
std::vector<GazetteerEntry> parse_gazetteer_spec(std::string_view spec);

}  // namespace textforge
