// Copyright 2026 The TextForge Authors.
// SPDX-License-Identifier: Apache-2.0

#include "textforge/pipeline.hpp"

#include "textforge/error.hpp"

namespace textforge {
namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  if (p.empty()) return {};
  std::filesystem::path path(p);
  return path.is_relative() && !base.empty() ? base / path : path;
}

}  // namespace

NumericExample numericalize_tokens(const std::vector<std::string>& tokens, const Vocabs& vocabs,
                                   const FeaturizerSettings& settings) {
  NumericExample n;
  for (const auto& tok : tokens) {
    n.token_ids.push_back(vocabs.tokens.id(tok));
    auto row = char_ids(tok, vocabs.chars, settings.max_chars);
    n.char_ids.insert(n.char_ids.end(), row.begin(), row.end());
    n.cap_ids.push_back(vocabs.caps.id(cap_feature_name(cap_feature(tok))));
    n.gaz_ids.push_back(vocabs.gazetteer.id(kNoGazetteer));
  }
  return n;
}

FeaturizerSettings featurizer_settings(const ComponentConfig& cfg) {
  FeaturizerSettings s;
  s.lowercase = cfg.get_bool("lowercase");
  s.max_chars = static_cast<int>(cfg.get_int("max_chars"));
  if (s.max_chars < 1) throw Error(ErrorCode::SchemaViolation, "featurizer max_chars must be >= 1");
  return s;
}

std::vector<DataSourceSpec> data_source_specs(const TaskConfig& config,
                                              const std::filesystem::path& base_dir) {
  std::vector<DataSourceSpec> out;
  const auto sources = config.data_sources();
  for (std::size_t i = 0; i < sources.size(); ++i) {
    const ComponentConfig& c = *sources[i];
    DataSourceSpec s;
    if (config.task_kind == TaskKind::WordTagging) {
      s.head = TaskHead::Word;
    } else if (config.task_kind == TaskKind::JointDocWord) {
      s.head = i == 0 ? TaskHead::Doc : TaskHead::Word;
    }
    s.format = c.get_string("label_format") == "joint" ? LabelFormat::Joint : LabelFormat::Single;
    s.train_path = resolve(base_dir, c.get_string("train_path"));
    s.eval_path = resolve(base_dir, c.get_string("eval_path"));
    s.test_path = resolve(base_dir, c.get_string("test_path"));
    s.min_freq = static_cast<int>(c.get_int("min_freq"));
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<SourceData> load_sources(const std::vector<DataSourceSpec>& sources,
                                     const FeaturizerSettings& settings, bool include_test) {
  std::vector<SourceData> out;
  for (const auto& s : sources) {
    SourceData d;
    d.train = load_tsv(s.train_path, s.head, s.format, Split::Train, settings);
    d.eval = load_tsv(s.eval_path, s.head, s.format, Split::Eval, settings);
    if (include_test && !s.test_path.empty()) {
      d.test = load_tsv(s.test_path, s.head, s.format, Split::Test, settings);
    }
    out.push_back(std::move(d));
  }
  return out;
}

Vocabs build_pipeline_vocabs(const std::vector<SourceData>& data,
                             const std::vector<DataSourceSpec>& sources) {
  std::vector<const Dataset*> train, extra;
  int min_freq = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    train.push_back(&data[i].train);
    extra.push_back(&data[i].eval);
    min_freq = i == 0 ? sources[i].min_freq : std::min(min_freq, sources[i].min_freq);
  }
  return build_vocabs(train, extra, std::max(min_freq, 1));
}

Pipeline instantiate_task(const TaskConfig& config, Vocabs vocabs, const InstantiateOptions& opts) {
  Pipeline p;
  p.config = config;
  p.base_dir = opts.base_dir;
  p.featurizer = featurizer_settings(config.featurizer());
  p.sources = data_source_specs(config, opts.base_dir);
  p.vocabs = std::move(vocabs);

  const auto& t = config.trainer();
  p.trainer.epochs = t.get_int("epochs");
  p.trainer.batch_size = t.get_int("batch_size");
  p.trainer.seed = opts.seed_override ? *opts.seed_override : static_cast<std::uint64_t>(t.get_int("seed"));
  p.trainer.patience = t.get_int("patience");
  p.trainer.max_grad_norm = t.get_float("max_grad_norm");
  if (p.trainer.epochs < 0 || p.trainer.batch_size < 1 || p.trainer.patience < 0) {
    throw Error(ErrorCode::SchemaViolation, "trainer needs epochs >= 0, batch_size >= 1, patience >= 0");
  }

  p.metric_reporter = config.metric_reporter().name;
  p.exporter.export_path = config.exporter().get_string("export_path");
  p.exporter.bake_vocab = config.exporter().get_bool("bake_vocab");

  Rng rng = Rng::derive(p.trainer.seed, kInitStream);
  ModelBuildContext ctx;
  ctx.vocabs = &p.vocabs;
  ctx.max_chars = p.featurizer.max_chars;
  ctx.rng = opts.initialize ? &rng : nullptr;
  ctx.base_dir = opts.base_dir;
  ctx.load_pretrained = opts.initialize;
  p.model = build_model(config.model(), config.task_kind, ctx);
  p.optimizer = make_optimizer(config.optimizer());
  return p;
}

Pipeline instantiate_task(const TaskConfig& config, const InstantiateOptions& opts) {
  const auto settings = featurizer_settings(config.featurizer());
  const auto sources = data_source_specs(config, opts.base_dir);
  const auto data = load_sources(sources, settings);
  return instantiate_task(config, build_pipeline_vocabs(data, sources), opts);
}

Batch make_text_batch(std::string_view text, const std::vector<GazetteerEntry>& entries,
                      const Vocabs& vocabs, const FeaturizerSettings& settings) {
  Example ex;
  ex.text = std::string(text);
  ex.gazetteer = entries;
  ex.features = featurize(text, entries, settings);
  const NumericExample n = numericalize_example(ex, 0, vocabs, settings);
  return pack_batch({&n}, settings.max_chars);
}

Batch make_token_batch(const std::vector<std::string>& tokens, const Vocabs& vocabs,
                       const FeaturizerSettings& settings) {
  const NumericExample n = numericalize_tokens(tokens, vocabs, settings);
  return pack_batch({&n}, settings.max_chars);
}

}  // namespace textforge
