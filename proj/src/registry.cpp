// Copyright 2026 The TextForge Authors.
// SPDX-License-Identifier: Apache-2.0

#include "textforge/registry.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "textforge/error.hpp"

namespace textforge {

using nlohmann::json;

namespace {

[[noreturn]] void schema_error(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::SchemaViolation, where + ": " + what);
}

std::string_view field_type_name(FieldType t) {
  switch (t) {
    case FieldType::Int: return "int";
    case FieldType::Float: return "float";
    case FieldType::Bool: return "bool";
    case FieldType::String: return "string";
    case FieldType::Enum: return "enum";
    case FieldType::IntList: return "list of int";
    case FieldType::StringList: return "list of string";
    case FieldType::Component: return "component";
  }
  return "?";
}

bool is_int(const json& v) { return v.is_number_integer() || v.is_number_unsigned(); }

json check_value(const FieldSpec& f, const json& v, const std::string& where) {
  auto wrong = [&]() -> json {
    schema_error(where + "." + f.name,
                 "expected " + std::string(field_type_name(f.type)) + ", got " + v.dump());
  };
  switch (f.type) {
    case FieldType::Int:
      return is_int(v) ? json(v.get<std::int64_t>()) : wrong();
    case FieldType::Float:
      return v.is_number() ? json(v.get<double>()) : wrong();
    case FieldType::Bool:
      return v.is_boolean() ? v : wrong();
    case FieldType::String:
      return v.is_string() ? v : wrong();
    case FieldType::Enum: {
      if (!v.is_string()) return wrong();
      const auto s = v.get<std::string>();
      if (std::find(f.enum_values.begin(), f.enum_values.end(), s) == f.enum_values.end()) {
        std::string allowed;
        for (const auto& e : f.enum_values) allowed += (allowed.empty() ? "" : ", ") + e;
        schema_error(where + "." + f.name, "'" + s + "' is not one of {" + allowed + "}");
      }
      return v;
    }
    case FieldType::IntList: {
      if (!v.is_array()) return wrong();
      json out = json::array();
      for (const auto& e : v) {
        if (!is_int(e)) return wrong();
        out.push_back(e.get<std::int64_t>());
      }
      return out;
    }
    case FieldType::StringList: {
      if (!v.is_array()) return wrong();
      for (const auto& e : v) {
        if (!e.is_string()) return wrong();
      }
      return v;
    }
    case FieldType::Component:
      break;
  }
  return wrong();
}

const json& param(const ComponentConfig& c, std::string_view field) {
  auto it = c.params.find(std::string(field));
  if (it == c.params.end()) {
    throw Error(ErrorCode::SchemaViolation, c.name + " has no field '" + std::string(field) + "'");
  }
  return *it;
}

void register_builtins(Registry& r) {
  using K = ComponentKind;
  using T = FieldType;
  using F = FieldSpec;

  r.register_component(K::Featurizer, "simple",
                       {F::with_default("lowercase", T::Bool, true),
                        F::with_default("max_chars", T::Int, 12)});

  r.register_component(K::DataHandler, "tsv",
                       {F::required("train_path", T::String), F::required("eval_path", T::String),
                        F::with_default("test_path", T::String, ""),
                        F::with_default("min_freq", T::Int, 1),
                        F::enumeration("label_format", {"single", "joint"}, "single")});

  r.register_component(K::EmbeddingLayer, "token_embedding",
                       {F::with_default("word_dim", T::Int, 32),
                        F::with_default("pretrained_path", T::String, ""),
                        F::with_default("char_dim", T::Int, 0),
                        F::with_default("char_filters", T::Int, 16),
                        F::with_default("char_widths", T::IntList, json::array({3})),
                        F::with_default("highway_layers", T::Int, 1),
                        F::with_default("cap_dim", T::Int, 0),
                        F::with_default("gazetteer_dim", T::Int, 0)});

  r.register_component(K::RepresentationLayer, "docnn",
                       {F::with_default("kernel_num", T::Int, 16),
                        F::with_default("kernel_sizes", T::IntList, json::array({3, 4, 5})),
                        F::with_default("input_dim", T::Int, 0)});
  r.register_component(K::RepresentationLayer, "bilstm_attn",
                       {F::with_default("hidden_dim", T::Int, 32),
                        F::with_default("attention_dim", T::Int, 32),
                        F::with_default("input_dim", T::Int, 0)});
  r.register_component(K::RepresentationLayer, "bilstm_tagger",
                       {F::with_default("hidden_dim", T::Int, 32),
                        F::with_default("input_dim", T::Int, 0)});

  r.register_component(K::DecoderLayer, "mlp",
                       {F::with_default("hidden_dims", T::IntList, json::array()),
                        F::with_default("input_dim", T::Int, 0)});

  r.register_component(K::OutputLayer, "classification_output", {});
  r.register_component(K::OutputLayer, "word_tagging_output", {});

  r.register_component(
      K::Model, "doc_model",
      {F::component("embedding", K::EmbeddingLayer, json{{"token_embedding", json::object()}}),
       F::component("representation", K::RepresentationLayer, json{{"docnn", json::object()}}),
       F::component("decoder", K::DecoderLayer, json{{"mlp", json::object()}}),
       F::component("output", K::OutputLayer, json{{"classification_output", json::object()}})});
  r.register_component(
      K::Model, "word_model",
      {F::component("embedding", K::EmbeddingLayer, json{{"token_embedding", json::object()}}),
       F::component("representation", K::RepresentationLayer,
                    json{{"bilstm_tagger", json::object()}}),
       F::component("decoder", K::DecoderLayer, json{{"mlp", json::object()}}),
       F::component("output", K::OutputLayer, json{{"word_tagging_output", json::object()}})});
  r.register_component(
      K::Model, "joint_model",
      {F::component("doc", K::Model,
                    json{{"doc_model", {{"representation", {{"bilstm_attn", json::object()}}}}}}),
       F::component("word", K::Model, json{{"word_model", json::object()}}),
       F::with_default("shared", T::StringList, json::array({"embedding", "representation.lstm"})),
       F::with_default("doc_loss_weight", T::Float, 1.0),
       F::with_default("word_loss_weight", T::Float, 1.0)});

  r.register_component(K::Optimizer, "adam",
                       {F::with_default("lr", T::Float, 0.001), F::with_default("beta1", T::Float, 0.9),
                        F::with_default("beta2", T::Float, 0.999),
                        F::with_default("eps", T::Float, 1e-8)});
  r.register_component(K::Optimizer, "sgd", {F::with_default("lr", T::Float, 0.1)});

  r.register_component(K::Trainer, "trainer",
                       {F::with_default("epochs", T::Int, 10), F::with_default("batch_size", T::Int, 16),
                        F::with_default("seed", T::Int, 0), F::with_default("patience", T::Int, 0),
                        F::with_default("max_grad_norm", T::Float, 0.0)});

  r.register_component(K::MetricReporter, "classification_metrics", {});
  r.register_component(K::MetricReporter, "word_tagging_metrics", {});
  r.register_component(K::MetricReporter, "joint_metrics", {});

  r.register_component(K::Exporter, "graph_exporter",
                       {F::with_default("export_path", T::String, "model.txgr"),
                        F::with_default("bake_vocab", T::Bool, true)});

  auto common = [](json model_default, json metric_default) {
    return std::vector<FieldSpec>{
        F::component("featurizer", K::Featurizer, json{{"simple", json::object()}}),
        F::component("model", K::Model, std::move(model_default)),
        F::component("optimizer", K::Optimizer, json{{"adam", json::object()}}),
        F::component("trainer", K::Trainer, json{{"trainer", json::object()}}),
        F::component("metric_reporter", K::MetricReporter, std::move(metric_default)),
        F::component("exporter", K::Exporter, json{{"graph_exporter", json::object()}})};
  };
  auto doc = common(json{{"doc_model", json::object()}},
                    json{{"classification_metrics", json::object()}});
  doc.push_back(F::component("data", K::DataHandler, std::nullopt));
  r.register_component(K::Task, "doc_classification", std::move(doc));

  auto word = common(json{{"word_model", json::object()}},
                     json{{"word_tagging_metrics", json::object()}});
  word.push_back(F::component("data", K::DataHandler, std::nullopt));
  r.register_component(K::Task, "word_tagging", std::move(word));

  auto joint = common(json{{"joint_model", json::object()}}, json{{"joint_metrics", json::object()}});
  joint.push_back(F::component("doc_data", K::DataHandler, std::nullopt));
  joint.push_back(F::component("word_data", K::DataHandler, std::nullopt));
  r.register_component(K::Task, "joint_doc_word", std::move(joint));
}

}  // namespace

std::string_view component_kind_name(ComponentKind kind) {
  switch (kind) {
    case ComponentKind::Featurizer: return "featurizer";
    case ComponentKind::DataHandler: return "data_handler";
    case ComponentKind::Model: return "model";
    case ComponentKind::EmbeddingLayer: return "embedding";
    case ComponentKind::RepresentationLayer: return "representation";
    case ComponentKind::DecoderLayer: return "decoder";
    case ComponentKind::OutputLayer: return "output";
    case ComponentKind::Optimizer: return "optimizer";
    case ComponentKind::Trainer: return "trainer";
    case ComponentKind::MetricReporter: return "metric_reporter";
    case ComponentKind::Exporter: return "exporter";
    case ComponentKind::Task: return "task";
  }
  return "?";
}

std::string_view task_kind_name(TaskKind k) {
  switch (k) {
    case TaskKind::DocClassification: return "doc_classification";
    case TaskKind::WordTagging: return "word_tagging";
    case TaskKind::JointDocWord: return "joint_doc_word";
  }
  return "?";
}

FieldSpec FieldSpec::required(std::string name, FieldType type) {
  FieldSpec f;
  f.name = std::move(name);
  f.type = type;
  return f;
}

FieldSpec FieldSpec::with_default(std::string name, FieldType type, json value) {
  FieldSpec f = required(std::move(name), type);
  f.default_value = std::move(value);
  return f;
}

FieldSpec FieldSpec::enumeration(std::string name, std::vector<std::string> values,
                                 std::optional<std::string> default_value) {
  FieldSpec f = required(std::move(name), FieldType::Enum);
  f.enum_values = std::move(values);
  if (default_value) f.default_value = json(*default_value);
  return f;
}

FieldSpec FieldSpec::component(std::string name, ComponentKind kind,
                               std::optional<json> default_value) {
  FieldSpec f = required(std::move(name), FieldType::Component);
  f.component_kind = kind;
  f.default_value = std::move(default_value);
  return f;
}

const FieldSpec* ComponentRegistration::field(std::string_view field_name) const {
  for (const auto& f : schema) {
    if (f.name == field_name) return &f;
  }
  return nullptr;
}

const Registry& Registry::global() {
  static const Registry registry = with_builtins();
  return registry;
}

Registry Registry::with_builtins() {
  Registry r;
  register_builtins(r);
  return r;
}

const ComponentRegistration& Registry::register_component(ComponentKind kind, std::string name,
                                                          std::vector<FieldSpec> schema) {
  if (find(kind, name)) {
    throw Error(ErrorCode::DuplicateRegistration,
                std::string(component_kind_name(kind)) + " '" + name + "' is already registered");
  }
  entries_.push_back({kind, std::move(name), std::move(schema)});
  return entries_.back();
}

const ComponentRegistration* Registry::find(ComponentKind kind, std::string_view name) const {
  for (const auto& e : entries_) {
    if (e.kind == kind && e.name == name) return &e;
  }
  return nullptr;
}

const ComponentRegistration& Registry::get(ComponentKind kind, std::string_view name) const {
  if (const auto* e = find(kind, name)) return *e;
  std::string known;
  for (const auto& n : names(kind)) known += (known.empty() ? "" : ", ") + n;
  throw Error(ErrorCode::UnknownComponent, "no " + std::string(component_kind_name(kind)) +
                                               " named '" + std::string(name) + "' (known: " +
                                               known + ")");
}

std::vector<std::string> Registry::names(ComponentKind kind) const {
  std::vector<std::string> out;
  for (const auto& e : entries_) {
    if (e.kind == kind) out.push_back(e.name);
  }
  return out;
}

ComponentConfig resolve_component(const json& node, ComponentKind kind, const Registry& registry,
                                  const std::string& where) {
  if (!node.is_object() || node.size() != 1) {
    schema_error(where, "expected a single-key object naming the " +
                            std::string(component_kind_name(kind)));
  }
  const auto first = node.begin();
  const std::string name = first.key();
  const json& body = first.value();
  const auto& reg = registry.get(kind, name);
  if (!body.is_object() && !body.is_null()) schema_error(where + "." + name, "expected an object");

  const std::string here = where + "." + name;
  if (body.is_object()) {
    for (const auto& [key, value] : body.items()) {
      if (!reg.field(key)) schema_error(here, "unknown field '" + key + "'");
    }
  }

  ComponentConfig out;
  out.kind = kind;
  out.name = name;
  for (const auto& f : reg.schema) {
    const json* value = nullptr;
    if (body.is_object()) {
      auto it = body.find(f.name);
      if (it != body.end()) value = &*it;
    }
    if (!value) {
      if (!f.default_value) schema_error(here, "missing required field '" + f.name + "'");
      value = &*f.default_value;
    }
    if (f.type == FieldType::Component) {
      out.children.emplace_back(f.name,
                                resolve_component(*value, f.component_kind, registry, here + "." + f.name));
    } else {
      out.params[f.name] = check_value(f, *value, here);
    }
  }
  return out;
}

std::int64_t ComponentConfig::get_int(std::string_view field) const {
  return param(*this, field).get<std::int64_t>();
}
double ComponentConfig::get_float(std::string_view field) const {
  return param(*this, field).get<double>();
}
bool ComponentConfig::get_bool(std::string_view field) const {
  return param(*this, field).get<bool>();
}
std::string ComponentConfig::get_string(std::string_view field) const {
  return param(*this, field).get<std::string>();
}
std::vector<std::int64_t> ComponentConfig::get_ints(std::string_view field) const {
  return param(*this, field).get<std::vector<std::int64_t>>();
}
std::vector<std::string> ComponentConfig::get_strings(std::string_view field) const {
  return param(*this, field).get<std::vector<std::string>>();
}

const ComponentConfig* ComponentConfig::find_child(std::string_view field) const {
  for (const auto& [n, c] : children) {
    if (n == field) return &c;
  }
  return nullptr;
}

const ComponentConfig& ComponentConfig::child(std::string_view field) const {
  if (const auto* c = find_child(field)) return *c;
  throw Error(ErrorCode::SchemaViolation, name + " has no component '" + std::string(field) + "'");
}

json ComponentConfig::to_json() const {
  json body = params;
  for (const auto& [n, c] : children) body[n] = c.to_json();
  return json{{name, body}};
}

bool ComponentConfig::operator==(const ComponentConfig& o) const {
  return kind == o.kind && name == o.name && params == o.params && children == o.children;
}

std::vector<const ComponentConfig*> TaskConfig::data_sources() const {
  if (task_kind == TaskKind::JointDocWord) return {&task.child("doc_data"), &task.child("word_data")};
  return {&task.child("data")};
}

TaskConfig parse_task_config(std::string_view text, const Registry& registry) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::MalformedDocument, e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::MalformedDocument, "config must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (key != "task") schema_error("config", "unknown top-level key '" + key + "'");
  }
  auto it = doc.find("task");
  if (it == doc.end()) schema_error("config", "missing 'task'");

  TaskConfig cfg;
  cfg.task = resolve_component(*it, ComponentKind::Task, registry, "task");
  const std::string& model = cfg.model().name;
  std::string expected_model;
  if (cfg.task.name == "doc_classification") {
    cfg.task_kind = TaskKind::DocClassification;
    expected_model = "doc_model";
  } else if (cfg.task.name == "word_tagging") {
    cfg.task_kind = TaskKind::WordTagging;
    expected_model = "word_model";
  } else if (cfg.task.name == "joint_doc_word") {
    cfg.task_kind = TaskKind::JointDocWord;
    expected_model = "joint_model";
  } else {
    throw Error(ErrorCode::UnknownComponent, "task '" + cfg.task.name + "' has no task kind");
  }
  if (model != expected_model) {
    schema_error("task." + cfg.task.name + ".model",
                 "task needs a '" + expected_model + "', got '" + model + "'");
  }
  if (cfg.task_kind == TaskKind::JointDocWord) {
    const auto& jm = cfg.model();
    if (jm.child("doc").name != "doc_model") schema_error("joint_model.doc", "expected doc_model");
    if (jm.child("word").name != "word_model") schema_error("joint_model.word", "expected word_model");
  }
  return cfg;
}

TaskConfig load_task_config(const std::string& path, const Registry& registry) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::FileNotFound, "cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_task_config(ss.str(), registry);
}

}  // namespace textforge
