// Copyright 2026 The TextForge Authors.
// SPDX-License-Identifier: Apache-2.0

#include "test_util.hpp"
#include "textforge/binio.hpp"
#include "textforge/data_handler.hpp"
#include "textforge/vocab.hpp"

using namespace textforge;

namespace {

Dataset doc_ds(const std::string& tsv, Split split = Split::Train) {
  return parse_tsv(tsv, TaskHead::Doc, LabelFormat::Single, split, {});
}

}  // namespace

TEST(Vocabulary, FrequencyOrderWithPadUnkPrefix) {
  const auto v = Vocabulary::from_counts({{"b", 2}, {"a", 2}, {"c", 5}, {"rare", 1}}, 2);
  EXPECT_EQ(v.entries(), (std::vector<std::string>{"<pad>", "<unk>", "c", "a", "b"}));
  EXPECT_EQ(v.id("rare"), Vocabulary::kUnkId);
  EXPECT_EQ(v.id("c"), 2);
  EXPECT_FALSE(v.find("rare").has_value());
}

TEST(Vocabulary, FromEntriesValidates) {
  EXPECT_TF_ERROR(Vocabulary::from_entries({"x"}, 1), ErrorCode::CorruptFile);
  EXPECT_TF_ERROR(Vocabulary::from_entries({"<pad>", "<unk>", "a", "a"}, 1), ErrorCode::CorruptFile);
}

TEST(Vocabulary, BinaryRoundTrip) {
  Vocabs v;
  v.tokens = Vocabulary::from_counts({{"x", 3}, {"y", 1}}, 1);
  v.chars = Vocabulary::from_counts({{"x", 3}}, 1);
  v.caps = capitalization_vocab();
  v.gazetteer = Vocabulary::from_counts({{"<none>", 3}}, 1);
  v.doc_labels = LabelSet({"b", "a", "b"});
  v.word_labels = LabelSet({"O"});
  binio::ByteWriter w;
  v.write(w);
  const auto bytes = w.take();
  binio::ByteReader r(bytes, ErrorCode::CorruptFile);
  EXPECT_EQ(Vocabs::read(r), v);
}

TEST(LabelSet, SortedUniqueAndUnknown) {
  LabelSet l({"weather", "alarm", "weather"});
  EXPECT_EQ(l.labels(), (std::vector<std::string>{"alarm", "weather"}));
  EXPECT_EQ(l.id("weather"), 1);
  EXPECT_TF_ERROR(l.id("nope"), ErrorCode::UnknownLabel);
}

TEST(ParseTsv, DocWordAndJointFormats) {
  const auto d = doc_ds("weather\twill it rain\n\nalarm\twake me\r\n");
  ASSERT_EQ(d.examples.size(), 2u);
  EXPECT_EQ(d.examples[1].doc_label, "alarm");
  EXPECT_EQ(d.examples[1].features.tokens.size(), 2u);

  const auto w = parse_tsv("O B-city\tto paris\n", TaskHead::Word, LabelFormat::Single, Split::Train, {});
  EXPECT_EQ(*w.examples[0].word_labels, (std::vector<std::string>{"O", "B-city"}));

  const auto j = parse_tsv("travel O B-city\tto paris\t3:8:city\n", TaskHead::Word, LabelFormat::Joint,
                           Split::Train, {});
  EXPECT_EQ(j.examples[0].doc_label, "travel");
  EXPECT_EQ(j.examples[0].features.gazetteer_labels[1], "city");
}

TEST(ParseTsv, MalformedLinesName) {
  EXPECT_TF_ERROR(doc_ds("no tab here\n"), ErrorCode::MalformedData);
  EXPECT_TF_ERROR(doc_ds("a b\ttext\n"), ErrorCode::MalformedData);
  EXPECT_TF_ERROR(parse_tsv("O\tto paris\n", TaskHead::Word, LabelFormat::Single, Split::Train, {}),
                  ErrorCode::MalformedData);
  try {
    doc_ds("ok\tfine\nbad\n", Split::Train);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find(":2:"), std::string::npos) << e.what();
  }
}

TEST(LoadTsv, MissingFile) {
  EXPECT_TF_ERROR(load_tsv("/nonexistent/x.tsv", TaskHead::Doc, LabelFormat::Single, Split::Train, {}),
                  ErrorCode::FileNotFound);
}

TEST(BuildVocabs, LabelsFromExtraSplitsAndMinFreq) {
  const auto train = doc_ds("a\tx x y\nb\tx z\n");
  const auto eval = doc_ds("c\ty\n", Split::Eval);
  const auto v = build_vocabs({&train}, {&eval}, 2);
  EXPECT_EQ(v.tokens.entries(), (std::vector<std::string>{"<pad>", "<unk>", "x"}));
  EXPECT_EQ(v.doc_labels.labels(), (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(v.chars.id("z"), v.chars.find("z").value());
  EXPECT_TF_ERROR(build_vocabs({}, {}, 1), ErrorCode::EmptyCorpus);
}

TEST(Batching, PacksPadsAndMasks) {
  const auto train = doc_ds("a\tx y z\nb\tx\n");
  const auto v = build_vocabs({&train}, {}, 1);
  const auto nums = numericalize_dataset(train, v, {});
  const auto batches = make_batches(nums, 2, 12, std::nullopt);
  ASSERT_EQ(batches.size(), 1u);
  const Batch& b = batches[0];
  EXPECT_EQ(b.token_ids.shape, (Shape{2, 3}));
  EXPECT_EQ(b.char_ids.shape, (Shape{2, 3, 12}));
  EXPECT_EQ(b.lengths, (std::vector<std::int64_t>{3, 1}));
  EXPECT_EQ(b.mask, (std::vector<std::uint8_t>{1, 1, 1, 1, 0, 0}));
  EXPECT_EQ(b.token_ids.data[4], Vocabulary::kPadId);
  ASSERT_TRUE(b.doc_labels.has_value());
  EXPECT_EQ(*b.doc_labels, (std::vector<std::int32_t>{0, 1}));
  EXPECT_EQ(unpad_token_ids(b)[1].size(), 1u);
}

TEST(Batching, ShuffleIsSeedDeterministicAndComplete) {
  std::string tsv;
  for (int i = 0; i < 20; ++i) tsv += "l\tw" + std::to_string(i) + "\n";
  const auto ds = doc_ds(tsv);
  const auto v = build_vocabs({&ds}, {}, 1);
  const auto nums = numericalize_dataset(ds, v, {});
  auto ids = [](const std::vector<Batch>& bs) {
    std::vector<std::size_t> out;
    for (const auto& b : bs) out.insert(out.end(), b.example_ids.begin(), b.example_ids.end());
    return out;
  };
  const auto a = ids(make_batches(nums, 3, 4, 7)), b = ids(make_batches(nums, 3, 4, 7)),
             c = ids(make_batches(nums, 3, 4, 8));
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  auto sorted = a;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) EXPECT_EQ(sorted[i], i);
  EXPECT_TF_ERROR(make_batches(nums, 0, 4, std::nullopt), ErrorCode::InvalidArgument);
}

TEST(Batching, InterleaveRoundRobinCyclesShorterTask) {
  const auto ds = doc_ds("l\ta\nl\tb\nl\tc\n");
  const auto v = build_vocabs({&ds}, {}, 1);
  const auto nums = numericalize_dataset(ds, v, {});
  const auto t0 = make_batches(nums, 1, 4, std::nullopt);  // 3 batches
  const auto t1 = make_batches(nums, 3, 4, std::nullopt);  // 1 batch
  const auto mixed = interleave_multitask({t0, t1});
  ASSERT_EQ(mixed.size(), 6u);
  for (std::size_t i = 0; i < mixed.size(); ++i) EXPECT_EQ(mixed[i].task_id, static_cast<int>(i % 2));
  EXPECT_TF_ERROR(interleave_multitask({t0}), ErrorCode::MultiTaskArity);
}
