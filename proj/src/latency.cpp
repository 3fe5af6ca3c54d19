// Copyright 2026 The TextForge Authors.
// SPDX-License-Identifier: Apache-2.0

#include "textforge/latency.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <thread>

#include "textforge/error.hpp"
#include "textforge/pipeline.hpp"

namespace textforge {
namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration<double, std::milli>(b - a).count();
}

std::string line(const LatencyReport& r) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-9s n=%-6lld p50 %8.4f ms  p90 %8.4f ms  p99 %8.4f ms", r.implementation.c_str(),
                static_cast<long long>(r.n_requests), r.p50_ms, r.p90_ms, r.p99_ms);
  return buf;
}

}  // namespace

nlohmann::json LatencyReport::to_json() const {
  return {{"implementation", implementation}, {"n_requests", n_requests}, {"p50_ms", p50_ms},
          {"p90_ms", p90_ms}, {"p99_ms", p99_ms}, {"machine_note", machine_note}};
}

double nearest_rank(std::vector<double> samples, int percent) {
  if (samples.empty()) throw Error(ErrorCode::EmptySampleSet, "no latency samples");
  if (percent < 1 || percent > 100) throw Error(ErrorCode::InvalidArgument, "percent must be in 1..100");
  std::sort(samples.begin(), samples.end());
  const auto n = static_cast<std::int64_t>(samples.size());
  const std::int64_t rank = (percent * n + 99) / 100;
  return samples[static_cast<std::size_t>(std::max<std::int64_t>(rank, 1) - 1)];
}

LatencyReport summarize_latencies(std::string implementation, const std::vector<double>& ms,
                                  std::string machine_note) {
  LatencyReport r;
  r.implementation = std::move(implementation);
  r.n_requests = static_cast<std::int64_t>(ms.size());
  r.p50_ms = nearest_rank(ms, 50);
  r.p90_ms = nearest_rank(ms, 90);
  r.p99_ms = nearest_rank(ms, 99);
  r.machine_note = std::move(machine_note);
  return r;
}

std::string machine_note() {
  return std::to_string(std::thread::hardware_concurrency()) +
         " hardware threads; single-threaded request loop; wall clock per request";
}

nlohmann::json BenchResult::to_json() const {
  return {{"eager", eager.to_json()},
          {"exported", exported.to_json()},
          {"reference_ms", {{"eager_p50", kReferenceEagerP50Ms}, {"exported_p50", kReferenceExportedP50Ms}}}};
}

std::string BenchResult::to_text() const {
  char ref[160];
  std::snprintf(ref, sizeof ref, "reference (different hardware): eager p50 %.2f ms -> exported p50 %.2f ms",
                kReferenceEagerP50Ms, kReferenceExportedP50Ms);
  const double speedup = exported.p50_ms > 0 ? eager.p50_ms / exported.p50_ms : 0.0;
  char sp[64];
  std::snprintf(sp, sizeof sp, "local p50 speedup: %.2fx", speedup);
  return line(eager) + "\n" + line(exported) + "\n" + sp + "\n" + ref + "\n" + "machine: " + eager.machine_note + "\n";
}

BenchResult run_latency_bench(const SingleTaskModel& model, const GraphRunner& graph, const Vocabs& vocabs,
                              const std::vector<std::string>& inputs, std::int64_t requests,
                              std::int64_t warmup) {
  if (requests < 1) throw Error(ErrorCode::InvalidArgument, "requests must be >= 1");
  if (inputs.empty()) throw Error(ErrorCode::EmptySampleSet, "no benchmark inputs");
  if (!graph.baked()) throw Error(ErrorCode::InputTypeMismatch, "bench needs a vocabulary-baked graph");
  const auto& settings = graph.featurizer();
  auto input = [&](std::int64_t k) -> const std::string& {
    return inputs[static_cast<std::size_t>(k) % inputs.size()];
  };

  auto eager_once = [&](const std::string& text) {
    // Research-mode inference: tape recorded as in training.
    Tensor probs = ops::softmax(model.logits(make_text_batch(text, {}, vocabs, settings)));
    return probs.data()[0];
  };
  Scratch scratch;
  auto graph_once = [&](const std::string& text) {
    const auto p = graph.run_text(text, {}, &scratch);
    return p.scores.empty() ? 0.0f : p.scores.front();
  };

  volatile float sink = 0.0f;
  std::vector<double> eager_ms, graph_ms;
  for (std::int64_t k = 0; k < warmup; ++k) {
    sink = sink + eager_once(input(k));
    sink = sink + graph_once(input(k));
  }
  // Interleaved so both sides see the same machine load.
  for (std::int64_t k = 0; k < requests; ++k) {
    const auto t0 = Clock::now();
    sink = sink + eager_once(input(k));
    const auto t1 = Clock::now();
    sink = sink + graph_once(input(k));
    const auto t2 = Clock::now();
    eager_ms.push_back(elapsed_ms(t0, t1));
    graph_ms.push_back(elapsed_ms(t1, t2));
  }
  const auto note = machine_note();
  return {summarize_latencies("eager", eager_ms, note), summarize_latencies("exported", graph_ms, note)};
}

}  // namespace textforge
