// Copyright 2026 The TextForge Authors.
// SPDX-License-Identifier: Apache-2.0

#include "json.hpp"
#include "test_util.hpp"
#include "textforge/registry.hpp"

using namespace textforge;
using nlohmann::json;

namespace {

std::string doc_config(json model = json{{"doc_model", json::object()}}) {
  return json{{"task",
               {{"doc_classification",
                 {{"data", {{"tsv", {{"train_path", "t.tsv"}, {"eval_path", "e.tsv"}}}}}, {"model", model}}}}}}
      .dump();
}

}  // namespace

TEST(Registry, BuiltinsCoverEveryKind) {
  const auto& r = Registry::global();
  EXPECT_EQ(r.names(ComponentKind::Task),
            (std::vector<std::string>{"doc_classification", "word_tagging", "joint_doc_word"}));
  EXPECT_NE(r.find(ComponentKind::RepresentationLayer, "bilstm_attn"), nullptr);
  EXPECT_EQ(r.find(ComponentKind::RepresentationLayer, "transformer"), nullptr);
}

TEST(Registry, DuplicateAndUnknown) {
  Registry r = Registry::with_builtins();
  EXPECT_TF_ERROR(r.register_component(ComponentKind::Optimizer, "sgd", {}), ErrorCode::DuplicateRegistration);
  r.register_component(ComponentKind::Optimizer, "lamb", {FieldSpec::with_default("lr", FieldType::Float, 0.1)});
  EXPECT_EQ(r.get(ComponentKind::Optimizer, "lamb").schema.size(), 1u);
  try {
    r.get(ComponentKind::Optimizer, "rmsprop");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownComponent);
    EXPECT_NE(std::string(e.what()).find("adam"), std::string::npos);
  }
}

TEST(Config, DefaultsAreFilledIn) {
  const auto cfg = parse_task_config(doc_config());
  EXPECT_EQ(cfg.task_kind, TaskKind::DocClassification);
  EXPECT_EQ(cfg.model().child("representation").name, "docnn");
  EXPECT_EQ(cfg.model().child("representation").get_ints("kernel_sizes"), (std::vector<std::int64_t>{3, 4, 5}));
  EXPECT_EQ(cfg.optimizer().name, "adam");
  EXPECT_DOUBLE_EQ(cfg.optimizer().get_float("lr"), 0.001);
  EXPECT_EQ(cfg.trainer().get_int("epochs"), 10);
  EXPECT_EQ(cfg.featurizer().get_int("max_chars"), 12);
  EXPECT_EQ(cfg.data_sources().size(), 1u);
}

TEST(Config, DumpReparsesToSameConfig) {
  const auto cfg = parse_task_config(doc_config(json{{"doc_model", {{"representation", {{"bilstm_attn", {{"hidden_dim", 8}}}}}}}}));
  EXPECT_EQ(parse_task_config(cfg.dump()), cfg);
  EXPECT_EQ(cfg.model().child("representation").get_int("hidden_dim"), 8);
}

TEST(Config, SchemaViolations) {
  EXPECT_TF_ERROR(parse_task_config("{not json"), ErrorCode::MalformedDocument);
  EXPECT_TF_ERROR(parse_task_config("[]"), ErrorCode::MalformedDocument);
  EXPECT_TF_ERROR(parse_task_config(R"({"job": {}})"), ErrorCode::SchemaViolation);
  EXPECT_TF_ERROR(parse_task_config(doc_config(json{{"doc_model", {{"dropout", 0.5}}}})), ErrorCode::SchemaViolation);
  EXPECT_TF_ERROR(parse_task_config(doc_config(json{{"word_model", json::object()}})), ErrorCode::SchemaViolation);
  EXPECT_TF_ERROR(parse_task_config(doc_config(json{{"doc_model", {{"representation", {{"bilstm_attn", {{"hidden_dim", "big"}}}}}}}})),
                  ErrorCode::SchemaViolation);
  EXPECT_TF_ERROR(parse_task_config(doc_config(json{{"doc_model", {{"representation", {{"transformer", json::object()}}}}}})),
                  ErrorCode::UnknownComponent);
  // Missing required data handler field.
  EXPECT_TF_ERROR(parse_task_config(R"({"task": {"doc_classification": {"data": {"tsv": {"train_path": "x"}}}}})"),
                  ErrorCode::SchemaViolation);
  EXPECT_TF_ERROR(parse_task_config(R"({"task": {"doc_classification": {}}})"), ErrorCode::SchemaViolation);
}

TEST(Config, EnumAndMissingFile) {
  EXPECT_TF_ERROR(parse_task_config(R"({"task": {"doc_classification": {"data": {"tsv": {"train_path": "a",
                  "eval_path": "b", "label_format": "bio"}}}}})"),
                  ErrorCode::SchemaViolation);
  EXPECT_TF_ERROR(load_task_config("/nonexistent/config.json"), ErrorCode::FileNotFound);
}

TEST(Config, JointModelDefaults) {
  const auto cfg = parse_task_config(R"({"task": {"joint_doc_word": {
      "doc_data": {"tsv": {"train_path": "a", "eval_path": "b"}},
      "word_data": {"tsv": {"train_path": "c", "eval_path": "d", "label_format": "joint"}}}}})");
  EXPECT_EQ(cfg.task_kind, TaskKind::JointDocWord);
  EXPECT_EQ(cfg.model().get_strings("shared"), (std::vector<std::string>{"embedding", "representation.lstm"}));
  EXPECT_EQ(cfg.data_sources().size(), 2u);
  EXPECT_EQ(cfg.metric_reporter().name, "joint_metrics");
}
