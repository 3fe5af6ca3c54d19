// Copyright 2026 The TextForge Authors.
// SPDX-License-Identifier: Apache-2.0

#include "test_util.hpp"
#include "textforge/exporter.hpp"
#include "textforge/latency.hpp"
#include "toy_fixture.hpp"

using namespace textforge;

TEST(NearestRank, IntegerRanks) {
  std::vector<double> v;
  for (int i = 100; i >= 1; --i) v.push_back(i);
  EXPECT_EQ(nearest_rank(v, 50), 50.0);
  EXPECT_EQ(nearest_rank(v, 90), 90.0);
  EXPECT_EQ(nearest_rank(v, 99), 99.0);
  EXPECT_EQ(nearest_rank(v, 100), 100.0);
  EXPECT_EQ(nearest_rank({7.0}, 1), 7.0);
  EXPECT_EQ(nearest_rank({1, 2, 3}, 50), 2.0);
  EXPECT_TF_ERROR(nearest_rank({}, 50), ErrorCode::EmptySampleSet);
  EXPECT_TF_ERROR(nearest_rank({1.0}, 0), ErrorCode::InvalidArgument);
}

TEST(Summarize, PercentilesOrdered) {
  Rng rng(4);
  std::vector<double> ms(999);
  for (auto& m : ms) m = rng.uniform(0.0f, 10.0f);
  const auto r = summarize_latencies("eager", ms, "note");
  EXPECT_EQ(r.n_requests, 999);
  EXPECT_LE(r.p50_ms, r.p90_ms);
  EXPECT_LE(r.p90_ms, r.p99_ms);
  EXPECT_EQ(r.to_json()["machine_note"], "note");
}

TEST(BenchReport, QuotesReferenceNumbers) {
  BenchResult b{summarize_latencies("eager", {2.0}), summarize_latencies("exported", {1.0})};
  const auto text = b.to_text();
  EXPECT_NE(text.find("34.08"), std::string::npos);
  EXPECT_NE(text.find("19.65"), std::string::npos);
  EXPECT_NE(text.find("2.00x"), std::string::npos);
  EXPECT_DOUBLE_EQ(b.to_json()["reference_ms"]["eager_p50"].get<double>(), 34.08);
}

TEST(Bench, RunsOnTrainedModel) {
  tf_test::TempDir dir("latency");
  write_toy_workspace(dir.path(), 2, {60, 20, 20});
  auto t = tf_test::train_toy_task(dir.path(), "doc_bilstm_attn.json", 1);
  const auto& p = t.pipeline;
  const GraphRunner baked(export_model(*p.model, p.vocabs, p.featurizer, true).front().second);
  const auto res = run_latency_bench(p.model->head(HeadKind::Doc), baked, p.vocabs, {"a b c", "weather now"}, 50, 5);
  EXPECT_EQ(res.eager.n_requests, 50);
  EXPECT_EQ(res.exported.n_requests, 50);
  EXPECT_LE(res.exported.p50_ms, res.exported.p99_ms);

  const GraphRunner ids(export_model(*p.model, p.vocabs, p.featurizer, false).front().second);
  EXPECT_TF_ERROR(run_latency_bench(p.model->head(HeadKind::Doc), ids, p.vocabs, {"a"}, 5, 0),
                  ErrorCode::InputTypeMismatch);
  EXPECT_TF_ERROR(run_latency_bench(p.model->head(HeadKind::Doc), baked, p.vocabs, {}, 5, 0),
                  ErrorCode::EmptySampleSet);
  EXPECT_TF_ERROR(run_latency_bench(p.model->head(HeadKind::Doc), baked, p.vocabs, {"a"}, 0, 0),
                  ErrorCode::InvalidArgument);
}
