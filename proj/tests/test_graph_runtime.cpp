// Copyright 2026 The TextForge Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cstring>

#include "test_util.hpp"
#include "textforge/binio.hpp"
#include "textforge/exporter.hpp"
#include "textforge/graph.hpp"
#include "textforge/runtime.hpp"
#include "toy_fixture.hpp"

using namespace textforge;

namespace {

struct Trained {
  tf_test::LoadedTask task;
  std::vector<Example> pool;
};

class Exported : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new tf_test::TempDir("graph");
    write_toy_workspace(dir_->path(), 21, {150, 30, 30});
    for (const char* c : {"doc_cnn.json", "doc_bilstm_attn.json", "tagger.json", "joint.json"}) {
      Trained t{tf_test::train_toy_task(dir_->path(), c, 2), {}};
      for (const auto& d : t.task.data) t.pool.insert(t.pool.end(), d.eval.examples.begin(), d.eval.examples.end());
      trained_->emplace(c, std::move(t));
    }
  }
  static void TearDownTestSuite() {
    trained_->clear();
    delete dir_;
    dir_ = nullptr;
  }
  static Trained& get(const std::string& c) { return trained_->at(c); }
  static const std::filesystem::path& dir() { return dir_->path(); }

 private:
  static tf_test::TempDir* dir_;
  static std::map<std::string, Trained>* trained_;
};
tf_test::TempDir* Exported::dir_ = nullptr;
std::map<std::string, Trained>* Exported::trained_ = new std::map<std::string, Trained>();

bool bitwise(const std::vector<float>& a, const std::vector<float>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(float)) == 0;
}

}  // namespace

TEST_F(Exported, EveryModelMatchesEager) {
  for (const char* c : {"doc_cnn.json", "doc_bilstm_attn.json", "tagger.json", "joint.json"}) {
    auto& t = get(c);
    const auto& p = t.task.pipeline;
    for (bool bake : {true, false}) {
      const auto graphs = export_model(*p.model, p.vocabs, p.featurizer, bake);
      EXPECT_EQ(graphs.size(), p.model->heads().size());
      for (const auto& [head, g] : graphs) {
        const GraphRunner runner(g);
        EXPECT_EQ(runner.head(), head);
        EXPECT_EQ(runner.baked(), bake);
        const auto rep = verify_equivalence(p.model->head(head), runner, p.vocabs, t.pool, 40, 1e-5, 3);
        EXPECT_TRUE(rep.passed) << c << " bake=" << bake << " dev=" << rep.max_abs_deviation;
        EXPECT_EQ(rep.samples, 80u);
      }
    }
  }
}

TEST_F(Exported, BakedEqualsIdGraphBitwise) {
  auto& t = get("doc_bilstm_attn.json");
  const auto& p = t.task.pipeline;
  const GraphRunner baked(export_model(*p.model, p.vocabs, p.featurizer, true).front().second);
  const GraphRunner ids(export_model(*p.model, p.vocabs, p.featurizer, false).front().second);
  Rng rng(5);
  for (int i = 0; i < 50; ++i) {
    std::vector<std::string> tokens(rng.below(7));
    for (auto& tok : tokens) {
      tok = rng.below(3) == 0 ? "unseen" + std::to_string(i) : p.vocabs.tokens.token(2 + rng.below(p.vocabs.tokens.size() - 2));
    }
    const auto a = baked.run_tokens(tokens);
    const auto b = ids.run_ids(numericalize_tokens(tokens, p.vocabs, p.featurizer));
    EXPECT_EQ(a.labels, b.labels);
    EXPECT_TRUE(bitwise(a.scores, b.scores));
  }
}

TEST_F(Exported, InputTypeChecks) {
  const auto& p = get("doc_cnn.json").task.pipeline;
  const GraphRunner baked(export_model(*p.model, p.vocabs, p.featurizer, true).front().second);
  const GraphRunner ids(export_model(*p.model, p.vocabs, p.featurizer, false).front().second);
  EXPECT_TF_ERROR(baked.run_ids(numericalize_tokens({"a"}, p.vocabs, p.featurizer)), ErrorCode::InputTypeMismatch);
  EXPECT_TF_ERROR(ids.run_text("a b"), ErrorCode::InputTypeMismatch);
  EXPECT_TF_ERROR(ids.run_tokens({"a"}), ErrorCode::InputTypeMismatch);
  const auto empty = baked.run_text("");
  EXPECT_EQ(empty.labels.size(), 1u);
  EXPECT_EQ(empty.label_names.front(), p.vocabs.doc_labels.label(empty.labels.front()));
}

TEST_F(Exported, TaggerOutputsOneLabelPerToken) {
  const auto& p = get("tagger.json").task.pipeline;
  const GraphRunner g(export_model(*p.model, p.vocabs, p.featurizer, true).front().second);
  EXPECT_EQ(g.run_text("fly to paris now").labels.size(), 4u);
  EXPECT_TRUE(g.run_text("").labels.empty());
}

TEST_F(Exported, BakeTwiceRejected) {
  const auto& p = get("doc_cnn.json").task.pipeline;
  auto g = export_model(*p.model, p.vocabs, p.featurizer, false).front().second;
  auto baked = prepend_vocab(g, p.vocabs);
  EXPECT_TRUE(baked.baked());
  EXPECT_EQ(baked, export_model(*p.model, p.vocabs, p.featurizer, true).front().second);
  EXPECT_TF_ERROR(prepend_vocab(baked, p.vocabs), ErrorCode::VocabAlreadyBaked);
}

TEST_F(Exported, UnsupportedRepresentationRejected) {
  const auto& p = get("tagger.json").task.pipeline;
  const auto& head = p.model->head(HeadKind::Word);
  Rng rng(1);
  auto emb = std::make_shared<TokenEmbedding>(head.embedding().spec(), &rng);
  auto rep = std::make_shared<BiLSTM>(emb->output_dim(), 4, &rng);
  auto dec = std::make_shared<MlpDecoder>(8, std::vector<std::int64_t>{}, head.num_classes(), &rng);
  SingleTaskModel m(HeadKind::Word, emb, rep, dec, std::make_shared<WordTaggingOutput>());
  EXPECT_TF_ERROR(export_head(m, p.vocabs, p.featurizer), ErrorCode::UnsupportedModule);
}

TEST_F(Exported, GraphFileRoundTripAndCorruption) {
  const auto& p = get("joint.json").task.pipeline;
  const auto graphs = export_model(*p.model, p.vocabs, p.featurizer, true);
  ASSERT_EQ(graphs.size(), 2u);
  EXPECT_EQ(head_graph_path("out/m.txgr", HeadKind::Word, true), std::filesystem::path("out/m.word.txgr"));
  EXPECT_EQ(head_graph_path("out/m.txgr", HeadKind::Doc, false), std::filesystem::path("out/m.txgr"));
  for (const auto& [head, g] : graphs) {
    const auto path = dir() / ("g_" + std::string(head_kind_name(head)) + ".txgr");
    save_graph(g, path);
    const auto bytes = binio::read_file(path);
    const auto loaded = load_graph(path);
    EXPECT_EQ(loaded, g);
    EXPECT_EQ(serialize_graph(loaded), bytes);

    auto flipped = bytes;
    flipped[flipped.size() / 2] ^= 0x10;
    EXPECT_TF_ERROR(deserialize_graph(flipped), ErrorCode::CorruptGraph);
    EXPECT_TF_ERROR(deserialize_graph(std::span(bytes).first(bytes.size() - 3)), ErrorCode::CorruptGraph);
    auto future = bytes;
    future[4] = 2;
    const auto crc = binio::crc32(std::span(future).first(future.size() - 4));
    for (int k = 0; k < 4; ++k) future[future.size() - 4 + k] = static_cast<std::uint8_t>(crc >> (8 * k));
    EXPECT_TF_ERROR(deserialize_graph(future), ErrorCode::VersionMismatch);
  }
  EXPECT_TF_ERROR(load_graph(dir() / "missing.txgr"), ErrorCode::FileNotFound);
}

TEST_F(Exported, ValidateRejectsBrokenTopology) {
  const auto& p = get("doc_cnn.json").task.pipeline;
  const auto g = export_model(*p.model, p.vocabs, p.featurizer, false).front().second;
  EXPECT_NO_THROW(validate_graph(g));

  auto dangling = g;
  dangling.ops.front().inputs.front() = "nowhere";
  EXPECT_TF_ERROR(validate_graph(dangling), ErrorCode::CorruptGraph);

  auto reordered = g;
  std::swap(reordered.ops.front(), reordered.ops.back());
  EXPECT_TF_ERROR(validate_graph(reordered), ErrorCode::CorruptGraph);

  auto bad_shape = g;
  bad_shape.consts.begin()->second.values.pop_back();
  EXPECT_TF_ERROR(validate_graph(bad_shape), ErrorCode::CorruptGraph);

  auto no_output = g;
  no_output.outputs = {"scores"};
  EXPECT_TF_ERROR(validate_graph(no_output), ErrorCode::CorruptGraph);
  EXPECT_TF_ERROR(save_graph(no_output, dir() / "never.txgr"), ErrorCode::CorruptGraph);
}

TEST_F(Exported, EmptySampleSetRejected) {
  auto& t = get("doc_cnn.json");
  const auto& p = t.task.pipeline;
  const GraphRunner g(export_model(*p.model, p.vocabs, p.featurizer, true).front().second);
  EXPECT_TF_ERROR(verify_equivalence(p.model->head(HeadKind::Doc), g, p.vocabs, t.pool, 0, 1e-5),
                  ErrorCode::EmptySampleSet);
}
