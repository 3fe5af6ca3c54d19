// Copyright 2026 The TextForge Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cstring>
#include <set>

#include "test_util.hpp"
#include "textforge/binio.hpp"
#include "textforge/checkpoint.hpp"
#include "toy_fixture.hpp"

using namespace textforge;
using nlohmann::json;

namespace {

class ToyTraining : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new tf_test::TempDir("trainer");
    write_toy_workspace(dir_->path(), 11, {120, 40, 20});
  }
  static void TearDownTestSuite() {
    delete dir_;
    dir_ = nullptr;
  }
  static const std::filesystem::path& dir() { return dir_->path(); }

  static json epochs(const std::string& task, int n, int patience = 0) {
    return {{"task", {{task, {{"trainer", {{"trainer", {{"epochs", n}, {"patience", patience}}}}}}}}}};
  }

 private:
  static tf_test::TempDir* dir_;
};
tf_test::TempDir* ToyTraining::dir_ = nullptr;

bool same_values(const NamedTensors& a, const NamedTensors& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].first != b[i].first || a[i].second.values() != b[i].second.values()) return false;
  }
  return true;
}

}  // namespace

TEST_F(ToyTraining, DocModelLearnsKeywords) {
  auto t = tf_test::load_toy_task(dir(), "doc_cnn.json", epochs("doc_classification", 4));
  Trainer trainer(t.pipeline, t.data);
  const auto report = trainer.train();
  ASSERT_EQ(report.history.size(), 4u);
  EXPECT_GE(*report.best_metric, 0.95);
  EXPECT_LT(report.history.back().train_loss, report.history.front().train_loss);
  EXPECT_DOUBLE_EQ(trainer.evaluate().metric, *report.best_metric);
  EXPECT_NE(report.to_text().find("best epoch"), std::string::npos);
}

TEST_F(ToyTraining, ResumeMatchesUninterruptedRun) {
  auto full = tf_test::load_toy_task(dir(), "tagger.json", epochs("word_tagging", 3));
  Trainer t_full(full.pipeline, full.data);
  std::vector<std::uint8_t> after_one;
  const auto full_report = t_full.train([&](const Checkpoint& c) {
    if (c.epoch == 1) after_one = serialize_checkpoint(c);
  });

  const Checkpoint c = deserialize_checkpoint(after_one);
  EXPECT_EQ(c.epoch, 1);
  EXPECT_EQ(serialize_checkpoint(c), after_one);
  auto resumed = tf_test::load_toy_task(dir(), "tagger.json", epochs("word_tagging", 3));
  Trainer t_res(resumed.pipeline, resumed.data);
  t_res.restore(c);
  const auto res_report = t_res.train();
  ASSERT_EQ(res_report.history.size(), full_report.history.size());
  for (std::size_t i = 0; i < full_report.history.size(); ++i) {
    EXPECT_EQ(res_report.history[i], full_report.history[i]) << i;
  }
  EXPECT_TRUE(same_values(snapshot_parameters(*full.pipeline.model), snapshot_parameters(*resumed.pipeline.model)));
}

TEST_F(ToyTraining, PatienceStopsEarly) {
  json patch = epochs("doc_classification", 30, 1);
  auto t = tf_test::load_toy_task(dir(), "doc_cnn.json", patch);
  Trainer trainer(t.pipeline, t.data);
  const auto report = trainer.train();
  EXPECT_TRUE(report.stopped_early);
  EXPECT_LT(report.history.size(), 30u);
  EXPECT_EQ(report.best_epoch + 2, static_cast<std::int64_t>(report.history.size()));
}

TEST_F(ToyTraining, CheckpointFileRoundTripAndCorruption) {
  auto t = tf_test::load_toy_task(dir(), "doc_cnn.json", epochs("doc_classification", 1));
  Trainer trainer(t.pipeline, t.data);
  trainer.train();
  const auto path = dir() / "ck.txfg";
  save_checkpoint(trainer.checkpoint(), path);
  const auto bytes = binio::read_file(path);
  const auto path2 = dir() / "ck2.txfg";
  save_checkpoint(load_checkpoint(path), path2);
  EXPECT_EQ(binio::read_file(path2), bytes);

  auto flipped = bytes;
  flipped[flipped.size() - 7] ^= 0x01;
  EXPECT_TF_ERROR(deserialize_checkpoint(flipped), ErrorCode::CorruptFile);
  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_TF_ERROR(deserialize_checkpoint(bad_magic), ErrorCode::CorruptFile);
  auto truncated = std::vector<std::uint8_t>(bytes.begin(), bytes.begin() + 20);
  EXPECT_TF_ERROR(deserialize_checkpoint(truncated), ErrorCode::CorruptFile);
  auto future = bytes;
  future[4] = 9;
  EXPECT_TF_ERROR(deserialize_checkpoint(future), ErrorCode::VersionMismatch);
  EXPECT_TF_ERROR(load_checkpoint(dir() / "nope.txfg"), ErrorCode::FileNotFound);

  const Pipeline restored = pipeline_from_checkpoint(load_checkpoint(path), dir());
  EXPECT_TRUE(same_values(snapshot_parameters(*restored.model), snapshot_parameters(*t.pipeline.model)));
}

TEST_F(ToyTraining, DocBatchLeavesWordHeadUntouched) {
  auto t = tf_test::load_toy_task(dir(), "joint.json");
  Trainer trainer(t.pipeline, t.data);
  const auto& model = *t.pipeline.model;
  std::set<const void*> doc_storage;
  for (const auto& [n, p] : model.head(HeadKind::Doc).named_parameters()) doc_storage.insert(p.impl());
  NamedTensors word_only;
  for (const auto& [n, p] : model.head(HeadKind::Word).named_parameters()) {
    if (!doc_storage.count(p.impl())) word_only.emplace_back(n, p);
  }
  ASSERT_FALSE(word_only.empty());
  const auto params = model.named_parameters();
  const auto before = snapshot_parameters(model.head(HeadKind::Word));
  int doc_steps = 0;
  for (const auto& batch : trainer.epoch_batches(0)) {
    if (batch.task_id != 0) continue;
    backward(model.loss(batch));
    t.pipeline.optimizer->step(params);
    if (++doc_steps == 3) break;
  }
  ASSERT_EQ(doc_steps, 3);
  for (const auto& [n, p] : word_only) {
    for (const auto& [bn, bp] : before) {
      if (bn == n) {
        EXPECT_EQ(std::memcmp(bp.values().data(), p.values().data(), p.values().size() * 4), 0) << n;
      }
    }
  }
  const auto after = snapshot_parameters(model.head(HeadKind::Word));
  EXPECT_FALSE(same_values(before, after));  // the shared trunk moved
}

TEST_F(ToyTraining, ArityAndEmptySplitErrors) {
  auto t = tf_test::load_toy_task(dir(), "joint.json");
  std::vector<SourceData> one = {t.data[0]};
  EXPECT_TF_ERROR(Trainer(t.pipeline, one), ErrorCode::MultiTaskArity);
  auto empty = t.data;
  empty[1].eval.examples.clear();
  EXPECT_TF_ERROR(Trainer(t.pipeline, empty), ErrorCode::EmptySplit);
}

TEST_F(ToyTraining, EvalResultJson) {
  auto t = tf_test::load_toy_task(dir(), "joint.json");
  Trainer trainer(t.pipeline, t.data);
  const auto r = trainer.evaluate();
  ASSERT_TRUE(r.doc && r.word && r.frame_accuracy);
  EXPECT_DOUBLE_EQ(r.metric, 0.5 * (r.doc->accuracy + r.word->macro_f1));
  const auto j = r.to_json();
  EXPECT_TRUE(j.contains("frame_accuracy"));
}
