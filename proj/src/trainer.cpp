// Copyright 2026 The TextForge Authors.
// SPDX-License-Identifier: Apache-2.0

#include "textforge/trainer.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

#include "textforge/error.hpp"

namespace textforge {
namespace {

HeadKind head_of(const DataSourceSpec& s) { return s.head == TaskHead::Doc ? HeadKind::Doc : HeadKind::Word; }

bool has_both_labels(const NumericExample& ex) {
  return ex.doc_label >= 0 && ex.word_labels.size() == ex.token_ids.size();
}

std::vector<Prediction> predict_all(const SingleTaskModel& head, const std::vector<NumericExample>& examples,
                                    int max_chars, std::int64_t batch_size) {
  std::vector<Prediction> out;
  out.reserve(examples.size());
  for (const auto& batch : make_batches(examples, batch_size, max_chars, std::nullopt)) {
    for (auto& p : head.predict(batch)) out.push_back(std::move(p));
  }
  return out;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

}  // namespace

NamedTensors snapshot_parameters(const Module& m) {
  NamedTensors out;
  for (const auto& [name, t] : m.named_parameters()) out.emplace_back(name, t.detach_copy());
  return out;
}

nlohmann::json EvalResult::to_json() const {
  nlohmann::json j = {{"metric", metric}};
  if (doc) j["doc"] = doc->to_json();
  if (word) j["word"] = word->to_json();
  if (frame_accuracy) j["frame_accuracy"] = *frame_accuracy;
  return j;
}

nlohmann::json TrainReport::to_json() const {
  nlohmann::json j = {{"history", history_to_json(history)}, {"best_epoch", best_epoch},
                      {"stopped_early", stopped_early}};
  j["best_metric"] = best_metric ? nlohmann::json(*best_metric) : nlohmann::json(nullptr);
  return j;
}

std::string TrainReport::to_text() const {
  std::string out;
  for (const auto& r : history) {
    out += "epoch " + std::to_string(r.epoch + 1) + "  loss " + fmt("%.6f", r.train_loss) + "  metric " +
           fmt("%.4f", r.metric) + "\n";
  }
  if (best_metric) {
    out += "best epoch " + std::to_string(best_epoch + 1) + "  metric " + fmt("%.4f", *best_metric) +
           (stopped_early ? "  (stopped early)" : "") + "\n";
  } else {
    out += "no epochs run\n";
  }
  return out;
}

NumericSources numericalize_sources(const std::vector<SourceData>& data, Split split,
                                    const Vocabs& vocabs, const FeaturizerSettings& settings) {
  NumericSources out;
  for (const auto& d : data) {
    const Dataset* ds = &d.train;
    if (split == Split::Eval) ds = &d.eval;
    if (split == Split::Test) {
      if (!d.test) throw Error(ErrorCode::EmptySplit, "no test split configured");
      ds = &*d.test;
    }
    out.per_source.push_back(numericalize_dataset(*ds, vocabs, settings));
  }
  return out;
}

EvalResult evaluate_model(const TaskModel& model, TaskKind task, const NumericSources& sources,
                          const std::vector<DataSourceSpec>& specs, const Vocabs& vocabs,
                          int max_chars, std::int64_t batch_size) {
  EvalResult r;
  for (std::size_t k = 0; k < sources.per_source.size(); ++k) {
    const auto& examples = sources.per_source[k];
    const auto kind = head_of(specs[k]);
    const auto preds = predict_all(model.head(kind), examples, max_chars, batch_size);
    if (kind == HeadKind::Doc) {
      std::vector<std::int32_t> p, g;
      for (std::size_t i = 0; i < examples.size(); ++i) {
        p.push_back(preds[i].labels.front());
        g.push_back(examples[i].doc_label);
      }
      r.doc = doc_metrics(p, g, vocabs.doc_labels.labels());
    } else {
      std::vector<std::int32_t> p, g;
      for (std::size_t i = 0; i < examples.size(); ++i) {
        p.insert(p.end(), preds[i].labels.begin(), preds[i].labels.end());
        g.insert(g.end(), examples[i].word_labels.begin(), examples[i].word_labels.end());
      }
      const auto n = static_cast<std::int64_t>(g.size());
      const std::vector<std::uint8_t> mask(g.size(), 1);
      r.word = word_metrics(IdTensor({1, n}, p), IdTensor({1, n}, g), mask, vocabs.word_labels.labels());
    }
  }

  if (task == TaskKind::JointDocWord) {
    std::vector<NumericExample> both;
    for (const auto& examples : sources.per_source) {
      for (const auto& ex : examples) {
        if (has_both_labels(ex)) both.push_back(ex);
      }
    }
    if (!both.empty()) {
      const auto doc = predict_all(model.head(HeadKind::Doc), both, max_chars, batch_size);
      const auto word = predict_all(model.head(HeadKind::Word), both, max_chars, batch_size);
      std::int64_t T = 0;
      for (const auto& ex : both) T = std::max<std::int64_t>(T, static_cast<std::int64_t>(ex.token_ids.size()));
      const auto n = static_cast<std::int64_t>(both.size());
      IdTensor wp = IdTensor::zeros({n, T}), wg = IdTensor::zeros({n, T});
      std::vector<std::uint8_t> mask(static_cast<std::size_t>(n * T), 0);
      std::vector<std::int32_t> dp, dg;
      for (std::int64_t i = 0; i < n; ++i) {
        const auto& ex = both[static_cast<std::size_t>(i)];
        dp.push_back(doc[static_cast<std::size_t>(i)].labels.front());
        dg.push_back(ex.doc_label);
        for (std::size_t t = 0; t < ex.word_labels.size(); ++t) {
          wp.data[i * T + t] = word[static_cast<std::size_t>(i)].labels[t];
          wg.data[i * T + t] = ex.word_labels[t];
          mask[i * T + t] = 1;
        }
      }
      r.frame_accuracy = frame_accuracy(dp, dg, wp, wg, mask);
    }
  }

  switch (task) {
    case TaskKind::DocClassification: r.metric = r.doc->accuracy; break;
    case TaskKind::WordTagging: r.metric = r.word->macro_f1; break;
    case TaskKind::JointDocWord: r.metric = 0.5 * (r.doc->accuracy + r.word->macro_f1); break;
  }
  return r;
}

Trainer::Trainer(Pipeline& pipeline, const std::vector<SourceData>& data) : p_(pipeline) {
  if (data.size() != p_.sources.size()) {
    throw Error(ErrorCode::MultiTaskArity, "got " + std::to_string(data.size()) + " data sources for " +
                                               std::to_string(p_.sources.size()) + " tasks");
  }
  for (std::size_t k = 0; k < data.size(); ++k) {
    if (data[k].train.examples.empty()) {
      throw Error(ErrorCode::EmptySplit, p_.sources[k].train_path.string() + " has no examples");
    }
    if (data[k].eval.examples.empty()) {
      throw Error(ErrorCode::EmptySplit, p_.sources[k].eval_path.string() + " has no examples");
    }
  }
  train_ = numericalize_sources(data, Split::Train, p_.vocabs, p_.featurizer);
  eval_ = numericalize_sources(data, Split::Eval, p_.vocabs, p_.featurizer);
}

std::vector<Batch> Trainer::epoch_batches(std::int64_t epoch) const {
  std::vector<std::vector<Batch>> per_task;
  for (std::size_t k = 0; k < train_.per_source.size(); ++k) {
    const auto seed = Rng::derive(p_.trainer.seed, shuffle_stream(epoch, k)).next_u64();
    per_task.push_back(make_batches(train_.per_source[k], p_.trainer.batch_size, p_.featurizer.max_chars, seed));
  }
  if (per_task.size() == 1) return std::move(per_task.front());
  return interleave_multitask(per_task);
}

EvalResult Trainer::evaluate() const {
  return evaluate_model(*p_.model, p_.config.task_kind, eval_, p_.sources, p_.vocabs,
                        p_.featurizer.max_chars, p_.trainer.batch_size);
}

TrainReport Trainer::train(const EpochCallback& on_epoch, std::ostream* log) {
  TrainReport report;
  const auto params = p_.model->named_parameters();
  while (epoch_ < p_.trainer.epochs) {
    if (p_.trainer.patience > 0 && stale_ >= p_.trainer.patience) {
      report.stopped_early = true;
      break;
    }
    double loss_sum = 0.0;
    std::int64_t steps = 0;
    for (const auto& batch : epoch_batches(epoch_)) {
      const bool word_batch = p_.sources[static_cast<std::size_t>(batch.task_id)].head == TaskHead::Word;
      if (word_batch && std::none_of(batch.mask.begin(), batch.mask.end(), [](auto m) { return m != 0; })) {
        continue;
      }
      Tensor loss = p_.model->loss(batch);
      backward(loss);
      if (p_.trainer.max_grad_norm > 0.0) clip_grad_norm(params, p_.trainer.max_grad_norm);
      p_.optimizer->step(params);
      loss_sum += loss.item();
      ++steps;
    }
    const EvalResult eval = evaluate();
    EpochRecord rec;
    rec.epoch = epoch_;
    rec.train_loss = steps > 0 ? loss_sum / static_cast<double>(steps) : 0.0;
    rec.metric = eval.metric;
    rec.eval = eval.to_json();
    history_.push_back(rec);
    if (!best_metric_ || eval.metric > *best_metric_) {
      best_metric_ = eval.metric;
      best_epoch_ = epoch_;
      best_params_ = snapshot_parameters(*p_.model);
      stale_ = 0;
    } else {
      ++stale_;
    }
    ++epoch_;
    current_params_ = snapshot_parameters(*p_.model);
    if (log) {
      *log << "epoch " << epoch_ << "/" << p_.trainer.epochs << "  loss " << fmt("%.6f", rec.train_loss)
           << "  metric " << fmt("%.4f", rec.metric) << "\n";
      log->flush();
    }
    if (on_epoch) on_epoch(checkpoint());
    if (p_.trainer.patience > 0 && stale_ >= p_.trainer.patience && epoch_ < p_.trainer.epochs) {
      report.stopped_early = true;
      break;
    }
  }
  if (!best_params_.empty()) assign_parameters(*p_.model, best_params_);
  report.history = history_;
  report.best_epoch = best_epoch_;
  report.best_metric = best_metric_;
  return report;
}

Checkpoint Trainer::checkpoint() const {
  Checkpoint c;
  c.config = p_.config.dump();
  c.vocabs = p_.vocabs;
  c.params = current_params_.empty() ? snapshot_parameters(*p_.model) : current_params_;
  c.best_params = best_params_;
  binio::ByteWriter w;
  p_.optimizer->write_state(w);
  c.optimizer_state = w.take();
  c.epoch = epoch_;
  c.best_metric = best_metric_;
  c.best_epoch = best_epoch_;
  c.epochs_without_improvement = stale_;
  c.history = history_;
  return c;
}

void Trainer::restore(const Checkpoint& c) {
  assign_parameters(*p_.model, c.params);
  binio::ByteReader r(c.optimizer_state, ErrorCode::CorruptFile);
  p_.optimizer->read_state(r);
  epoch_ = c.epoch;
  best_metric_ = c.best_metric;
  best_epoch_ = c.best_epoch;
  stale_ = c.epochs_without_improvement;
  history_ = c.history;
  best_params_ = c.best_params;
  current_params_ = snapshot_parameters(*p_.model);
}

Pipeline pipeline_from_checkpoint(const Checkpoint& c, const std::filesystem::path& base_dir) {
  InstantiateOptions opts;
  opts.base_dir = base_dir;
  opts.initialize = false;
  Pipeline p = instantiate_task(parse_task_config(c.config), c.vocabs, opts);
  assign_parameters(*p.model, c.best_params.empty() ? c.params : c.best_params);
  return p;
}

}  // namespace textforge
