// Copyright 2026 The TextForge Authors.
// SPDX-License-Identifier: Apache-2.0

#include "test_util.hpp"
#include "textforge/data_handler.hpp"
#include "textforge/featurizer.hpp"
#include "textforge/vocab.hpp"

using namespace textforge;

namespace {

std::vector<std::string> texts(const std::vector<TokenSpan>& toks) {
  std::vector<std::string> out;
  for (const auto& t : toks) out.push_back(t.text);
  return out;
}

}  // namespace

TEST(Tokenize, SplitsOnSpaceAndPunctuation) {
  const auto toks = tokenize("Book a flight, to  Paris!", true);
  EXPECT_EQ(texts(toks), (std::vector<std::string>{"book", "a", "flight", ",", "to", "paris", "!"}));
  EXPECT_EQ(toks[5].start, 19u);
  EXPECT_EQ(toks[5].end, 24u);
}

TEST(Tokenize, KeepsCaseWhenAsked) {
  EXPECT_EQ(texts(tokenize("Hi THERE", false)), (std::vector<std::string>{"Hi", "THERE"}));
}

TEST(Tokenize, UnicodeSpacesSeparateAndLettersStay) {
  const std::string s = "caf\xc3\xa9\xc2\xa0"
                        "na\xc3\xafve\xe3\x80\x80x";
  EXPECT_EQ(texts(tokenize(s, true)), (std::vector<std::string>{"caf\xc3\xa9", "na\xc3\xafve", "x"}));
}

TEST(Tokenize, EmptyAndWhitespaceOnly) {
  EXPECT_TRUE(tokenize("", true).empty());
  EXPECT_TRUE(tokenize("  \t ", true).empty());
}

TEST(CapFeature, Classes) {
  EXPECT_EQ(cap_feature("paris"), CapFeature::AllLower);
  EXPECT_EQ(cap_feature("Paris"), CapFeature::InitCap);
  EXPECT_EQ(cap_feature("NASA"), CapFeature::AllCaps);
  EXPECT_EQ(cap_feature("iPhone"), CapFeature::Other);
  EXPECT_EQ(cap_feature("42"), CapFeature::Other);
  EXPECT_EQ(cap_feature_name(CapFeature::InitCap), "init_cap");
}

TEST(Chars, Utf8SplitAndPaddedIds) {
  EXPECT_EQ(utf8_chars("a\xc3\xa9z"), (std::vector<std::string>{"a", "\xc3\xa9", "z"}));
  const auto alphabet = Vocabulary::from_counts({{"a", 1}, {"b", 1}}, 1);
  const auto ids = char_ids("abzab", alphabet, 4);
  ASSERT_EQ(ids.size(), 4u);
  EXPECT_EQ(ids[0], alphabet.id("a"));
  EXPECT_EQ(ids[2], Vocabulary::kUnkId);
  EXPECT_EQ(char_ids("a", alphabet, 3)[1], Vocabulary::kPadId);
  EXPECT_TF_ERROR(char_ids("a", alphabet, 0), ErrorCode::InvalidArgument);
}

TEST(Gazetteer, AlignsByByteOverlap) {
  const auto toks = tokenize("fly to new york now", true);
  const auto labels = align_gazetteer(toks, {{7, 15, "city"}});
  ASSERT_EQ(labels.size(), 5u);
  EXPECT_FALSE(labels[1].has_value());
  EXPECT_EQ(labels[2], "city");
  EXPECT_EQ(labels[3], "city");
  EXPECT_FALSE(labels[4].has_value());
}

TEST(Gazetteer, RejectsOverlapAndEmptySpans) {
  const auto toks = tokenize("a b c", true);
  EXPECT_TF_ERROR(align_gazetteer(toks, {{0, 3, "x"}, {2, 5, "y"}}), ErrorCode::OverlappingEntries);
  EXPECT_TF_ERROR(align_gazetteer(toks, {{2, 2, "x"}}), ErrorCode::OverlappingEntries);
}

TEST(Gazetteer, SpecParsing) {
  const auto e = parse_gazetteer_spec("0:3:city,4:9:date");
  ASSERT_EQ(e.size(), 2u);
  EXPECT_EQ(e[1], (GazetteerEntry{4, 9, "date"}));
  EXPECT_TRUE(parse_gazetteer_spec("").empty());
  EXPECT_TF_ERROR(parse_gazetteer_spec("0:x:city"), ErrorCode::MalformedData);
  EXPECT_TF_ERROR(parse_gazetteer_spec("0:3"), ErrorCode::MalformedData);
}

TEST(Featurize, AlphabetFillsCharRows) {
  const auto alphabet = Vocabulary::from_counts({{"h", 1}, {"i", 1}}, 1);
  const auto ex = featurize("Hi there", {}, {}, &alphabet);
  ASSERT_EQ(ex.char_ids.size(), 2u);
  EXPECT_EQ(ex.char_ids[0][0], alphabet.id("h"));
  EXPECT_EQ(ex.cap_features[0], CapFeature::InitCap);
  EXPECT_TRUE(featurize("Hi there", {}, {}).char_ids.empty());
}

TEST(Featurize, TrainingAndInferencePathsAgree) {
  Rng rng(99);
  const FeaturizerSettings settings;
  for (int i = 0; i < 200; ++i) {
    const std::string text = tf_test::random_text(rng);
    const Dataset ds = parse_tsv("lbl\t" + text + "\n", TaskHead::Doc, LabelFormat::Single, Split::Train, settings);
    const auto inference = featurize(text, {}, settings);
    if (ds.examples.empty()) {
      EXPECT_TRUE(text.empty());
      continue;
    }
    EXPECT_EQ(ds.examples[0].features.to_bytes(), inference.to_bytes()) << text;
  }
}
