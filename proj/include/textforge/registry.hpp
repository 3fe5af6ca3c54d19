// Copyright 2026 The TextForge Authors.
// SPDX-License-Identifier: Apache-2.0

// Component registry and task-config parsing.
//
// A config is a JSON document of the form
//
//   {"task": {"doc_classification": {
//      "data": {"tsv": {"train_path": "...", "eval_path": "..."}},
//      "model": {"doc_model": {"representation": {"docnn": {"kernel_num": 8}}}},
//      "optimizer": {"adam": {"lr": 0.01}}}}}
//
// Nested components are single-key objects naming the registered variant.
// Unknown keys are rejected. Omitted fields take the default attached to the
// registration schema.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

namespace textforge {

enum class ComponentKind {
  Featurizer,
  DataHandler,
  Model,
  EmbeddingLayer,
  RepresentationLayer,
  DecoderLayer,
  OutputLayer,
  Optimizer,
  Trainer,
  MetricReporter,
  Exporter,
  Task,
};

std::string_view component_kind_name(ComponentKind kind);

enum class FieldType { Int, Float, Bool, String, Enum, IntList, StringList, Component };

struct FieldSpec {
  std::string name;
  FieldType type = FieldType::Int;
  /// Absent means the field is required. For Component fields the default is
  /// a single-key object like {"adam": {}}.
  std::optional<nlohmann::json> default_value;
  std::vector<std::string> enum_values;
  ComponentKind component_kind = ComponentKind::Task;

  static FieldSpec required(std::string name, FieldType type);
  static FieldSpec with_default(std::string name, FieldType type, nlohmann::json value);
  static FieldSpec enumeration(std::string name, std::vector<std::string> values,
                               std::optional<std::string> default_value);
  static FieldSpec component(std::string name, ComponentKind kind,
                             std::optional<nlohmann::json> default_value);
};

struct ComponentRegistration {
  ComponentKind kind;
  std::string name;
  std::vector<FieldSpec> schema;

  const FieldSpec* field(std::string_view field_name) const;
};

class Registry {
 public:
  Registry() = default;

  /// Registry holding every built-in component. Built once on first use.
  static const Registry& global();
  /// A fresh registry pre-populated with the built-ins.
  static Registry with_builtins();

  const ComponentRegistration& register_component(ComponentKind kind, std::string name,
                                                  std::vector<FieldSpec> schema);
  const ComponentRegistration* find(ComponentKind kind, std::string_view name) const;
  /// Throws UnknownComponent.
  const ComponentRegistration& get(ComponentKind kind, std::string_view name) const;
  std::vector<std::string> names(ComponentKind kind) const;

 private:
  std::vector<ComponentRegistration> entries_;
};

/// A resolved component: its variant name plus default-filled fields.
struct ComponentConfig {
  ComponentKind kind = ComponentKind::Task;
  std::string name;
  nlohmann::json params = nlohmann::json::object();  // non-component fields
  std::vector<std::pair<std::string, ComponentConfig>> children;

  std::int64_t get_int(std::string_view field) const;
  double get_float(std::string_view field) const;
  bool get_bool(std::string_view field) const;
  std::string get_string(std::string_view field) const;
  std::vector<std::int64_t> get_ints(std::string_view field) const;
  std::vector<std::string> get_strings(std::string_view field) const;
  const ComponentConfig& child(std::string_view field) const;
  const ComponentConfig* find_child(std::string_view field) const;

  /// Canonical {"name": {fields...}} form.
  nlohmann::json to_json() const;
  bool operator==(const ComponentConfig& o) const;
};

/// Validates and default-fills a {"name": {...}} object against `kind`.
ComponentConfig resolve_component(const nlohmann::json& node, ComponentKind kind,
                                  const Registry& registry, const std::string& where);

enum class TaskKind { DocClassification, WordTagging, JointDocWord };
std::string_view task_kind_name(TaskKind k);

struct TaskConfig {
  TaskKind task_kind = TaskKind::DocClassification;
  ComponentConfig task;

  const ComponentConfig& featurizer() const { return task.child("featurizer"); }
  const ComponentConfig& model() const { return task.child("model"); }
  const ComponentConfig& optimizer() const { return task.child("optimizer"); }
  const ComponentConfig& trainer() const { return task.child("trainer"); }
  const ComponentConfig& metric_reporter() const { return task.child("metric_reporter"); }
  const ComponentConfig& exporter() const { return task.child("exporter"); }
  /// One source per task head: [data] or [doc_data, word_data].
  std::vector<const ComponentConfig*> data_sources() const;

  nlohmann::json to_json() const { return {{"task", task.to_json()}}; }
  std::string dump() const { return to_json().dump(2); }
  bool operator==(const TaskConfig& o) const {
    return task_kind == o.task_kind && task == o.task;
  }
};

/// Throws MalformedDocument, UnknownComponent or SchemaViolation.
TaskConfig parse_task_config(std::string_view text, const Registry& registry = Registry::global());
TaskConfig load_task_config(const std::string& path, const Registry& registry = Registry::global());

}  // namespace textforge
