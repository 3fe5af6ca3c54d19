// Copyright 2026 The TextForge Authors.
// SPDX-License-Identifier: Apache-2.0

#include "textforge/featurizer.hpp"

#include <charconv>

#include "textforge/binio.hpp"
#include "textforge/error.hpp"
#include "textforge/vocab.hpp"

namespace textforge {
namespace {

struct CodePoint {
  char32_t value;
  std::size_t length;
};

CodePoint decode_utf8(std::string_view s, std::size_t pos) {
  const auto b0 = static_cast<unsigned char>(s[pos]);
  auto cont = [&](std::size_t i) {
    return pos + i < s.size() && (static_cast<unsigned char>(s[pos + i]) & 0xC0) == 0x80;
  };
  auto bits = [&](std::size_t i) { return static_cast<char32_t>(s[pos + i] & 0x3F); };
  if (b0 < 0x80) return {b0, 1};
  if ((b0 & 0xE0) == 0xC0 && cont(1)) return {((b0 & 0x1Fu) << 6) | bits(1), 2};
  if ((b0 & 0xF0) == 0xE0 && cont(1) && cont(2)) {
    return {((b0 & 0x0Fu) << 12) | (bits(1) << 6) | bits(2), 3};
  }
  if ((b0 & 0xF8) == 0xF0 && cont(1) && cont(2) && cont(3)) {
    return {((b0 & 0x07u) << 18) | (bits(1) << 12) | (bits(2) << 6) | bits(3), 4};
  }
  return {0xFFFD, 1};
}

bool is_unicode_space(char32_t c) {
  switch (c) {
    case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D: case 0x20:
    case 0x85: case 0xA0: case 0x1680: case 0x2028: case 0x2029:
    case 0x202F: case 0x205F: case 0x3000:
      return true;
    default:
      return c >= 0x2000 && c <= 0x200A;
  }
}

bool is_ascii_punct(char32_t c) {
  return (c >= 0x21 && c <= 0x2F) || (c >= 0x3A && c <= 0x40) || (c >= 0x5B && c <= 0x60) ||
         (c >= 0x7B && c <= 0x7E);
}

bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_lower(char c) { return c >= 'a' && c <= 'z'; }

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) {
    if (is_upper(c)) c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::size_t parse_offset(std::string_view field, std::string_view spec) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw Error(ErrorCode::MalformedData, "bad gazetteer offset in '" + std::string(spec) + "'");
  }
  return v;
}

}  // namespace

std::string_view cap_feature_name(CapFeature c) {
  switch (c) {
    case CapFeature::AllLower: return "all_lower";
    case CapFeature::InitCap: return "init_cap";
    case CapFeature::AllCaps: return "all_caps";
    case CapFeature::Other: return "other";
  }
  return "other";
}

CapFeature cap_feature(std::string_view token) {
  bool any_letter = false, all_lower = true, all_upper = true, rest_lower = true;
  bool first_upper = !token.empty() && is_upper(token[0]);
  for (std::size_t i = 0; i < token.size(); ++i) {
    const char c = token[i];
    if (!is_upper(c) && !is_lower(c)) continue;
    any_letter = true;
    all_lower = all_lower && is_lower(c);
    all_upper = all_upper && is_upper(c);
    if (i > 0) rest_lower = rest_lower && is_lower(c);
  }
  if (!any_letter) return CapFeature::Other;
  if (all_lower) return CapFeature::AllLower;
  if (first_upper && rest_lower) return CapFeature::InitCap;
  if (all_upper) return CapFeature::AllCaps;
  return CapFeature::Other;
}

std::vector<TokenSpan> tokenize(std::string_view text, bool lowercase) {
  std::vector<TokenSpan> tokens;
  std::size_t start = 0;
  bool in_token = false;
  auto flush = [&](std::size_t end) {
    if (in_token) {
      const auto raw = text.substr(start, end - start);
      tokens.push_back({lowercase ? ascii_lower(raw) : std::string(raw), start, end});
      in_token = false;
    }
  };
  std::size_t pos = 0;
  while (pos < text.size()) {
    const CodePoint cp = decode_utf8(text, pos);
    if (is_unicode_space(cp.value)) {
      flush(pos);
    } else if (is_ascii_punct(cp.value)) {
      flush(pos);
      const auto raw = text.substr(pos, 1);
      tokens.push_back({lowercase ? ascii_lower(raw) : std::string(raw), pos, pos + 1});
    } else if (!in_token) {
      in_token = true;
      start = pos;
    }
    pos += cp.length;
  }
  flush(text.size());
  return tokens;
}

std::vector<std::string> utf8_chars(std::string_view token) {
  std::vector<std::string> chars;
  std::size_t pos = 0;
  while (pos < token.size()) {
    const CodePoint cp = decode_utf8(token, pos);
    chars.emplace_back(token.substr(pos, cp.length));
    pos += cp.length;
  }
  return chars;
}

std::vector<std::int32_t> char_ids(std::string_view token, const Vocabulary& alphabet,
                                   int max_chars) {
  if (max_chars < 1) throw Error(ErrorCode::InvalidArgument, "max_chars must be >= 1");
  std::vector<std::int32_t> row(static_cast<std::size_t>(max_chars), Vocabulary::kPadId);
  std::size_t pos = 0;
  for (int i = 0; i < max_chars && pos < token.size(); ++i) {
    const CodePoint cp = decode_utf8(token, pos);
    row[static_cast<std::size_t>(i)] = alphabet.id(token.substr(pos, cp.length));
    pos += cp.length;
  }
  return row;
}

std::vector<std::optional<std::string>> align_gazetteer(const std::vector<TokenSpan>& tokens,
                                                        const std::vector<GazetteerEntry>& entries) {
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].start >= entries[i].end) {
      throw Error(ErrorCode::OverlappingEntries, "gazetteer entry with empty span");
    }
    if (i > 0 && entries[i].start < entries[i - 1].end) {
      throw Error(ErrorCode::OverlappingEntries,
                  "gazetteer entries must be sorted and non-overlapping");
    }
  }
  std::vector<std::optional<std::string>> labels(tokens.size());
  std::size_t e = 0;
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    while (e < entries.size() && entries[e].end <= tokens[t].start) ++e;
    if (e < entries.size() && entries[e].start < tokens[t].end) labels[t] = entries[e].kind;
  }
  return labels;
}

FeaturizedExample featurize(std::string_view text, const std::vector<GazetteerEntry>& entries,
                            const FeaturizerSettings& settings, const Vocabulary* alphabet) {
  FeaturizedExample ex;
  ex.raw_text = std::string(text);
  ex.tokens = tokenize(text, settings.lowercase);
  ex.gazetteer_labels = align_gazetteer(ex.tokens, entries);
  ex.cap_features.reserve(ex.tokens.size());
  for (const auto& tok : ex.tokens) {
    ex.cap_features.push_back(cap_feature(text.substr(tok.start, tok.end - tok.start)));
  }
  if (alphabet) {
    ex.char_ids.reserve(ex.tokens.size());
    for (const auto& tok : ex.tokens) {
      ex.char_ids.push_back(char_ids(tok.text, *alphabet, settings.max_chars));
    }
  }
  return ex;
}

std::vector<std::uint8_t> FeaturizedExample::to_bytes() const {
  binio::ByteWriter w;
  w.str(raw_text);
  w.u64(tokens.size());
  for (const auto& t : tokens) {
    w.str(t.text);
    w.u64(t.start);
    w.u64(t.end);
  }
  w.u64(char_ids.size());
  for (const auto& row : char_ids) w.i32s(row);
  w.u64(gazetteer_labels.size());
  for (const auto& g : gazetteer_labels) {
    w.u8(g.has_value() ? 1 : 0);
    if (g) w.str(*g);
  }
  w.u64(cap_features.size());
  for (auto c : cap_features) w.u8(static_cast<std::uint8_t>(c));
  return w.take();
}

std::vector<GazetteerEntry> parse_gazetteer_spec(std::string_view spec) {
  std::vector<GazetteerEntry> out;
  if (spec.empty()) return out;
  std::size_t pos = 0;
  while (pos <= spec.size()) {
    const auto comma = spec.find(',', pos);
    const auto item = spec.substr(pos, comma == std::string_view::npos ? spec.npos : comma - pos);
    const auto c1 = item.find(':');
    const auto c2 = c1 == item.npos ? item.npos : item.find(':', c1 + 1);
    if (c2 == item.npos || c2 + 1 >= item.size()) {
      throw Error(ErrorCode::MalformedData, "bad gazetteer item '" + std::string(item) + "'");
    }
    GazetteerEntry e;
    e.start = parse_offset(item.substr(0, c1), spec);
    e.end = parse_offset(item.substr(c1 + 1, c2 - c1 - 1), spec);
    e.kind = std::string(item.substr(c2 + 1));
    out.push_back(std::move(e));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

}  // namespace textforge
