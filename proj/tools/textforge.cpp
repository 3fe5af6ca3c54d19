// Copyright 2026 The TextForge Authors.
// SPDX-License-Identifier: Apache-2.0

// textforge train | predict | export | bench

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "textforge/checkpoint.hpp"
#include "textforge/error.hpp"
#include "textforge/exporter.hpp"
#include "textforge/latency.hpp"
#include "textforge/pipeline.hpp"
#include "textforge/rng.hpp"
#include "textforge/runtime.hpp"
#include "textforge/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace textforge;

namespace {

std::optional<std::uint64_t> env_seed() {
  const char* s = std::getenv("TEXTFORGE_SEED");
  if (!s || !*s) return std::nullopt;
  try {
    std::size_t used = 0;
    const auto v = std::stoull(s, &used);
    if (used != std::string(s).size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::InvalidArgument, std::string("TEXTFORGE_SEED must be an unsigned integer, got '") + s + "'");
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::FileNotFound, "cannot write " + path.string());
  out << text;
}

std::vector<Example> pool_of(const std::vector<SourceData>& data) {
  std::vector<Example> pool;
  for (const auto& d : data) {
    const auto& ds = d.test ? *d.test : d.eval;
    pool.insert(pool.end(), ds.examples.begin(), ds.examples.end());
  }
  return pool;
}

// ---------------------------------------------------------------------------

struct TrainArgs {
  std::string config, out, resume;
  int verify_samples = 25;
};

int cmd_train(const TrainArgs& a) {
  const TaskConfig cfg = load_task_config(a.config);
  const fs::path base = fs::path(a.config).parent_path();
  const fs::path out(a.out);
  fs::create_directories(out);

  InstantiateOptions opts;
  opts.base_dir = base;
  opts.seed_override = env_seed();
  const auto settings = featurizer_settings(cfg.featurizer());
  const auto specs = data_source_specs(cfg, base);
  const auto data = load_sources(specs, settings, true);

  std::optional<Checkpoint> resume;
  if (!a.resume.empty()) {
    resume = load_checkpoint(a.resume);
    if (parse_task_config(resume->config).to_json() != cfg.to_json()) {
      throw Error(ErrorCode::InvalidArgument, "checkpoint " + a.resume + " was trained with a different config");
    }
  }
  Pipeline p = instantiate_task(cfg, resume ? resume->vocabs : build_pipeline_vocabs(data, specs), opts);
  Trainer trainer(p, data);
  if (resume) {
    trainer.restore(*resume);
    std::cerr << "resuming after epoch " << trainer.completed_epochs() << "\n";
  }

  const fs::path ckpt_path = out / "checkpoint.txfg";
  const auto report = trainer.train([&](const Checkpoint& c) { save_checkpoint(c, ckpt_path); }, &std::cerr);
  save_checkpoint(trainer.checkpoint(), ckpt_path);

  json j = {{"task", std::string(task_kind_name(cfg.task_kind))},
            {"seed", p.trainer.seed},
            {"parameters", p.model->parameter_count()},
            {"train", report.to_json()},
            {"eval", trainer.evaluate().to_json()}};
  std::string text = report.to_text();

  if (std::any_of(data.begin(), data.end(), [](const auto& d) { return d.test.has_value(); })) {
    bool all = std::all_of(data.begin(), data.end(), [](const auto& d) { return d.test.has_value(); });
    if (all) {
      const auto test = numericalize_sources(data, Split::Test, p.vocabs, p.featurizer);
      j["test"] = evaluate_model(*p.model, cfg.task_kind, test, p.sources, p.vocabs, p.featurizer.max_chars,
                                 p.trainer.batch_size)
                      .to_json();
    }
  }

  fs::path graph_path = p.exporter.export_path;
  if (graph_path.is_relative()) graph_path = out / graph_path;
  const auto graphs = export_model(*p.model, p.vocabs, p.featurizer, p.exporter.bake_vocab);
  const auto pool = pool_of(data);
  json exported = json::array();
  for (const auto& [head, g] : graphs) {
    const auto path = head_graph_path(graph_path, head, graphs.size() > 1);
    save_graph(g, path);
    json e = {{"head", std::string(head_kind_name(head))}, {"path", path.filename().string()}};
    if (a.verify_samples > 0) {
      const GraphRunner runner(g);
      const auto eq = verify_equivalence(p.model->head(head), runner, p.vocabs, pool,
                                         static_cast<std::size_t>(a.verify_samples), 1e-5, p.trainer.seed);
      e["equivalence"] = {{"samples", eq.samples}, {"max_abs_deviation", eq.max_abs_deviation},
                          {"argmax_agree", eq.argmax_agree}, {"passed", eq.passed}};
      text += "export " + path.filename().string() + ": equivalence " + (eq.passed ? "passed" : "FAILED") + "\n";
    } else {
      text += "export " + path.filename().string() + "\n";
    }
    exported.push_back(e);
  }
  j["exported"] = exported;

  write_text(out / "report.json", j.dump(2) + "\n");
  write_text(out / "report.txt", text);
  std::cout << text;
  return 0;
}

// ---------------------------------------------------------------------------

json prediction_json(HeadKind head, const std::vector<std::string>& names, const std::vector<std::int32_t>& labels,
                     const std::vector<float>& scores, std::int64_t C) {
  if (head == HeadKind::Doc) {
    const auto l = labels.front();
    return {{"label", names.at(static_cast<std::size_t>(l))}, {"score", scores.at(static_cast<std::size_t>(l))}};
  }
  json tags = json::array(), tag_scores = json::array();
  for (std::size_t t = 0; t < labels.size(); ++t) {
    tags.push_back(names.at(static_cast<std::size_t>(labels[t])));
    tag_scores.push_back(scores.at(t * static_cast<std::size_t>(C) + static_cast<std::size_t>(labels[t])));
  }
  return {{"tags", tags}, {"tag_scores", tag_scores}};
}

struct PredictArgs {
  std::vector<std::string> graphs;
  std::string model;
};

int cmd_predict(const PredictArgs& a) {
  std::vector<GraphRunner> runners;
  for (const auto& g : a.graphs) {
    runners.emplace_back(load_graph(g));
    if (!runners.back().baked()) {
      throw Error(ErrorCode::InputTypeMismatch, g + " takes id tensors; export it with vocabularies baked in");
    }
  }
  std::optional<Pipeline> p;
  if (!a.model.empty()) p = pipeline_from_checkpoint(load_checkpoint(a.model));

  std::string line;
  while (std::getline(std::cin, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string text = line;
    std::vector<GazetteerEntry> entries;
    if (const auto tab = line.find('\t'); tab != std::string::npos) {
      text = line.substr(0, tab);
      entries = parse_gazetteer_spec(line.substr(tab + 1));
    }
    json j = json::object();
    if (p) {
      const auto batch = make_text_batch(text, entries, p->vocabs, p->featurizer);
      for (HeadKind h : p->model->heads()) {
        const auto pred = p->model->head(h).predict(batch).front();
        const auto& names = h == HeadKind::Doc ? p->vocabs.doc_labels.labels() : p->vocabs.word_labels.labels();
        j.update(prediction_json(h, names, pred.labels, pred.scores, pred.num_classes));
      }
      const auto heads = p->model->heads();
      if (std::find(heads.begin(), heads.end(), HeadKind::Word) != heads.end()) {
        json toks = json::array();
        for (const auto& t : featurize(text, entries, p->featurizer).tokens) toks.push_back(t.text);
        j["tokens"] = toks;
      }
    } else {
      for (const auto& r : runners) {
        const auto pred = r.run_text(text, entries);
        j.update(prediction_json(r.head(), r.labels(), pred.labels, pred.scores, pred.num_classes));
        if (r.head() == HeadKind::Word) {
          json toks = json::array();
          for (const auto& t : featurize(text, entries, r.featurizer()).tokens) toks.push_back(t.text);
          j["tokens"] = toks;
        }
      }
    }
    std::cout << j.dump() << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------

struct ExportArgs {
  std::string model, out, graph;
  bool no_bake = false;
};

int cmd_export(const ExportArgs& a) {
  const Checkpoint c = load_checkpoint(a.model);
  if (!a.graph.empty()) {
    save_graph(prepend_vocab(load_graph(a.graph), c.vocabs), a.out);
    std::cout << "wrote " << a.out << "\n";
    return 0;
  }
  const Pipeline p = pipeline_from_checkpoint(c);
  const auto graphs = export_model(*p.model, p.vocabs, p.featurizer, !a.no_bake);
  for (const auto& [head, g] : graphs) {
    const auto path = head_graph_path(a.out, head, graphs.size() > 1);
    save_graph(g, path);
    std::cout << "wrote " << path.string() << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------

struct BenchArgs {
  std::string model, graph, report;
  std::int64_t requests = 1000, warmup = 50;
  std::uint64_t seed = 0;
};

int cmd_bench(const BenchArgs& a) {
  const Pipeline p = pipeline_from_checkpoint(load_checkpoint(a.model));
  const GraphRunner runner(load_graph(a.graph));
  const auto& model = p.model->head(runner.head());

  // Fixed seeded workload shared by both implementations.
  Rng rng = Rng::derive(a.seed, 99);
  std::vector<std::string> inputs(256);
  for (auto& text : inputs) {
    const auto n = 4 + rng.below(9);
    for (std::uint64_t k = 0; k < n; ++k) {
      const auto& v = p.vocabs.tokens;
      const std::string tok = v.size() > 2 && rng.below(8) != 0
                                  ? v.token(static_cast<std::int32_t>(2 + rng.below(v.size() - 2)))
                                  : "unseen" + std::to_string(rng.below(100));
      text += (k ? " " : "") + tok;
    }
  }
  const auto res = run_latency_bench(model, runner, p.vocabs, inputs, a.requests, a.warmup);
  std::cout << res.to_text();
  if (!a.report.empty()) write_text(a.report, res.to_json().dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"textforge: train, export and serve small text models"};
  app.require_subcommand(1);

  TrainArgs train;
  auto* t = app.add_subcommand("train", "train a model from a task config");
  t->add_option("--config", train.config, "task config (JSON)")->required();
  t->add_option("--out", train.out, "output directory")->required();
  t->add_option("--resume", train.resume, "checkpoint to continue from");
  t->add_option("--verify-samples", train.verify_samples, "equivalence samples per exported graph (0 = skip)");

  PredictArgs predict;
  auto* pr = app.add_subcommand("predict", "predict one line of stdin at a time");
  auto* g_opt = pr->add_option("--graph", predict.graphs, "exported graph (repeatable)");
  auto* m_opt = pr->add_option("--model", predict.model, "checkpoint for eager prediction");
  g_opt->excludes(m_opt);
  m_opt->excludes(g_opt);

  ExportArgs exp;
  auto* ex = app.add_subcommand("export", "export a checkpoint to a static graph");
  ex->add_option("--model", exp.model, "checkpoint")->required();
  ex->add_option("--out", exp.out, "graph path")->required();
  ex->add_option("--graph", exp.graph, "bake vocabularies into an existing id graph instead");
  ex->add_flag("--no-bake", exp.no_bake, "keep id-tensor inputs");

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "eager vs exported latency");
  b->add_option("--model", bench.model, "checkpoint")->required();
  b->add_option("--graph", bench.graph, "baked graph for one head")->required();
  b->add_option("--requests", bench.requests, "timed requests")->check(CLI::PositiveNumber);
  b->add_option("--warmup", bench.warmup, "untimed warmup requests")->check(CLI::NonNegativeNumber);
  b->add_option("--seed", bench.seed, "workload seed");
  b->add_option("--report", bench.report, "write the reports as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*t) return cmd_train(train);
    if (*pr) {
      if (predict.graphs.empty() && predict.model.empty()) {
        throw Error(ErrorCode::InvalidArgument, "predict needs --graph or --model");
      }
      return cmd_predict(predict);
    }
    if (*ex) return cmd_export(exp);
    if (*b) return cmd_bench(bench);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
