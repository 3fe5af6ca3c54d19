// Copyright 2026 The TextForge Authors.
// SPDX-License-Identifier: Apache-2.0

#include "test_util.hpp"
#include "textforge/metrics.hpp"

using namespace textforge;

TEST(DocMetrics, HandComputedPerClass) {
  // preds a a b b c, golds a b b b a
  const std::int32_t p[] = {0, 0, 1, 1, 2}, g[] = {0, 1, 1, 1, 0};
  const auto r = doc_metrics(p, g, {"a", "b", "c"});
  EXPECT_DOUBLE_EQ(r.accuracy, 0.6);
  ASSERT_EQ(r.per_class.size(), 3u);
  EXPECT_EQ(r.per_class[0].label, "a");
  EXPECT_DOUBLE_EQ(r.per_class[0].precision, 0.5);
  EXPECT_DOUBLE_EQ(r.per_class[0].recall, 0.5);
  EXPECT_DOUBLE_EQ(r.per_class[1].precision, 1.0);
  EXPECT_NEAR(r.per_class[1].f1, 0.8, 1e-12);
  EXPECT_EQ(r.per_class[1].support, 3);
  EXPECT_DOUBLE_EQ(r.per_class[2].f1, 0.0);
  EXPECT_NEAR(r.macro_f1, (0.5 + 0.8 + 0.0) / 3.0, 1e-12);
}

TEST(DocMetrics, Errors) {
  const std::int32_t p[] = {0}, g[] = {0, 1};
  EXPECT_TF_ERROR(doc_metrics(p, g, {}), ErrorCode::LengthMismatch);
  EXPECT_TF_ERROR(doc_metrics({}, {}, {}), ErrorCode::EmptyEval);
}

TEST(WordMetrics, MaskExcludesPadding) {
  IdTensor p({2, 2}, {0, 1, 1, 1}), g({2, 2}, {0, 1, 1, 0});
  const std::uint8_t mask[] = {1, 1, 1, 0};
  const auto r = word_metrics(p, g, mask, {"O", "B-city"});
  EXPECT_EQ(r.total, 3);
  EXPECT_DOUBLE_EQ(r.accuracy, 1.0);
  EXPECT_DOUBLE_EQ(r.macro_f1, 1.0);
  const std::uint8_t short_mask[] = {1};
  EXPECT_TF_ERROR(word_metrics(p, g, short_mask, {}), ErrorCode::LengthMismatch);
}

TEST(FrameAccuracy, NeedsDocAndEveryTokenRight) {
  const std::int32_t dp[] = {0, 1, 1}, dg[] = {0, 1, 0};
  IdTensor wp({3, 2}, {1, 0, 1, 1, 0, 0}), wg({3, 2}, {1, 0, 1, 0, 0, 0});
  const std::uint8_t mask[] = {1, 1, 1, 1, 1, 1};
  EXPECT_NEAR(frame_accuracy(dp, dg, wp, wg, mask), 1.0 / 3.0, 1e-12);
  const std::uint8_t mask2[] = {1, 1, 1, 0, 1, 1};
  EXPECT_NEAR(frame_accuracy(dp, dg, wp, wg, mask2), 2.0 / 3.0, 1e-12);
}

TEST(MetricReport, JsonAndTable) {
  const std::int32_t p[] = {1}, g[] = {1};
  auto r = doc_metrics(p, g, {"x", "y"});
  r.frame_accuracy = 0.5;
  const auto j = r.to_json();
  EXPECT_EQ(j["per_class"][0]["label"], "y");
  EXPECT_EQ(j["frame_accuracy"], 0.5);
  EXPECT_NE(r.to_table().find("frame_accuracy 0.5000"), std::string::npos);
}
