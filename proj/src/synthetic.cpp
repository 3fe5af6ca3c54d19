// Copyright 2026 The TextForge Authors.
// SPDX-License-Identifier: Apache-2.0

#include "textforge/synthetic.hpp"

#include <fstream>

#include "json.hpp"
#include "textforge/error.hpp"
#include "textforge/rng.hpp"

namespace textforge {
namespace {

const std::vector<std::string>& filler() {
  static const std::vector<std::string> words = {
      "the",   "a",     "please", "can",   "you",    "me",    "my",     "for",  "to",    "now",
      "today", "check", "show",   "what",  "is",     "there", "some",   "any",  "about", "next",
      "this",  "that",  "give",   "tell",  "really", "quick", "again",  "just", "later", "maybe",
      "set",   "get",   "find",   "need",  "want",   "with",  "from",   "our",  "new",   "old"};
  return words;
}

std::string pick(Rng& rng, const std::vector<std::string>& v) {
  return v[static_cast<std::size_t>(rng.below(v.size()))];
}

std::string capitalize(std::string w) {
  if (!w.empty() && w[0] >= 'a' && w[0] <= 'z') w[0] = static_cast<char>(w[0] - 'a' + 'A');
  return w;
}

struct Sentence {
  std::vector<std::string> words, tags;
  std::string doc;
};

// Filler words with `inserts` placed at random positions.
Sentence compose(Rng& rng, std::size_t min_fill, std::size_t max_fill,
                 const std::vector<std::pair<std::string, std::string>>& inserts) {
  Sentence s;
  const auto n = min_fill + static_cast<std::size_t>(rng.below(max_fill - min_fill + 1));
  for (std::size_t i = 0; i < n; ++i) {
    s.words.push_back(pick(rng, filler()));
    s.tags.emplace_back("O");
  }
  for (const auto& [word, tag] : inserts) {
    const auto at = static_cast<std::ptrdiff_t>(rng.below(s.words.size() + 1));
    s.words.insert(s.words.begin() + at, word);
    s.tags.insert(s.tags.begin() + at, tag);
  }
  if (rng.below(4) == 0) s.words[0] = capitalize(s.words[0]);
  return s;
}

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? " " : "") + v[i];
  return out;
}

template <typename Gen>
ToyCorpus generate(std::uint64_t seed, ToySizes sizes, Gen gen) {
  ToyCorpus c;
  Rng rng = Rng::derive(seed, 77);
  for (std::size_t i = 0; i < sizes.train; ++i) c.train += gen(rng) + "\n";
  for (std::size_t i = 0; i < sizes.eval; ++i) c.eval += gen(rng) + "\n";
  for (std::size_t i = 0; i < sizes.test; ++i) c.test += gen(rng) + "\n";
  return c;
}

std::vector<std::pair<std::string, std::string>> slot_inserts(Rng& rng, std::size_t lo, std::size_t hi) {
  std::vector<std::pair<std::string, std::string>> out;
  const auto n = lo + static_cast<std::size_t>(rng.below(hi - lo + 1));
  for (std::size_t i = 0; i < n; ++i) out.emplace_back(pick(rng, toy_slot_lexicon()), "B-slot");
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::FileNotFound, "cannot write " + path.string());
  out << text;
}

void write_split(const std::filesystem::path& dir, const std::string& prefix, const ToyCorpus& c) {
  write_text(dir / (prefix + "_train.tsv"), c.train);
  write_text(dir / (prefix + "_eval.tsv"), c.eval);
  write_text(dir / (prefix + "_test.tsv"), c.test);
}

nlohmann::json tsv(const std::string& prefix, const char* format = "single") {
  return {{"tsv",
           {{"train_path", prefix + "_train.tsv"},
            {"eval_path", prefix + "_eval.tsv"},
            {"test_path", prefix + "_test.tsv"},
            {"label_format", format}}}};
}

}  // namespace

const std::vector<std::pair<std::string, std::string>>& toy_doc_keywords() {
  static const std::vector<std::pair<std::string, std::string>> k = {
      {"refund", "billing"}, {"forecast", "weather"}, {"playlist", "music"}, {"alarm", "alarm"}, {"traffic", "traffic"}};
  return k;
}

const std::vector<std::string>& toy_slot_lexicon() {
  static const std::vector<std::string> s = {"paris", "london", "tokyo", "berlin", "madrid",
                                             "rome",  "oslo",   "cairo", "lima",   "delhi"};
  return s;
}

ToyCorpus toy_doc_corpus(std::uint64_t seed, ToySizes sizes) {
  return generate(seed, sizes, [](Rng& rng) {
    const auto& [kw, label] = toy_doc_keywords()[static_cast<std::size_t>(rng.below(toy_doc_keywords().size()))];
    const auto s = compose(rng, 3, 10, {{kw, "O"}});
    return label + "\t" + join(s.words);
  });
}

ToyCorpus toy_tagging_corpus(std::uint64_t seed, ToySizes sizes) {
  return generate(seed + 1, sizes, [](Rng& rng) {
    const auto s = compose(rng, 3, 9, slot_inserts(rng, 1, 2));
    return join(s.tags) + "\t" + join(s.words);
  });
}

ToyCorpus toy_joint_corpus(std::uint64_t seed, bool joint_format, ToySizes sizes) {
  return generate(seed + (joint_format ? 3 : 2), sizes, [joint_format](Rng& rng) {
    const auto& [kw, label] = toy_doc_keywords()[static_cast<std::size_t>(rng.below(toy_doc_keywords().size()))];
    auto inserts = slot_inserts(rng, 0, 2);
    inserts.emplace_back(kw, "O");
    const auto s = compose(rng, 2, 7, inserts);
    return (joint_format ? label + " " + join(s.tags) : label) + "\t" + join(s.words);
  });
}

void write_toy_workspace(const std::filesystem::path& dir, std::uint64_t seed, ToySizes sizes) {
  std::filesystem::create_directories(dir);
  write_split(dir, "doc", toy_doc_corpus(seed, sizes));
  write_split(dir, "tag", toy_tagging_corpus(seed, sizes));
  write_split(dir, "joint_doc", toy_joint_corpus(seed, false, sizes));
  write_split(dir, "joint", toy_joint_corpus(seed, true, sizes));

  using nlohmann::json;
  const json adam = {{"adam", {{"lr", 0.01}}}};
  auto trainer = [&](int epochs) {
    return json{{"trainer", {{"epochs", epochs}, {"batch_size", 16}, {"seed", seed}}}};
  };
  const json doc_cnn = {{"task",
                         {{"doc_classification",
                           {{"data", tsv("doc")},
                            {"model", {{"doc_model", {{"representation", {{"docnn", json::object()}}}}}}},
                            {"optimizer", adam},
                            {"trainer", trainer(10)},
                            {"exporter", {{"graph_exporter", {{"export_path", "doc_cnn.txgr"}}}}}}}}}};
  const json doc_attn = {
      {"task",
       {{"doc_classification",
         {{"data", tsv("doc")},
          {"model",
           {{"doc_model",
             {{"embedding", {{"token_embedding", {{"char_dim", 8}, {"char_widths", {2, 3}}, {"cap_dim", 4}}}}},
              {"representation", {{"bilstm_attn", json::object()}}}}}}},
          {"optimizer", adam},
          {"trainer", trainer(10)},
          {"exporter", {{"graph_exporter", {{"export_path", "doc_bilstm_attn.txgr"}}}}}}}}}};
  const json tagger = {{"task",
                        {{"word_tagging",
                          {{"data", tsv("tag")},
                           {"optimizer", adam},
                           {"trainer", trainer(15)},
                           {"exporter", {{"graph_exporter", {{"export_path", "tagger.txgr"}}}}}}}}}};
  const json joint = {{"task",
                       {{"joint_doc_word",
                         {{"doc_data", tsv("joint_doc")},
                          {"word_data", tsv("joint", "joint")},
                          {"optimizer", adam},
                          {"trainer", trainer(20)},
                          {"exporter", {{"graph_exporter", {{"export_path", "joint.txgr"}}}}}}}}}};
  write_text(dir / "doc_cnn.json", doc_cnn.dump(2) + "\n");
  write_text(dir / "doc_bilstm_attn.json", doc_attn.dump(2) + "\n");
  write_text(dir / "tagger.json", tagger.dump(2) + "\n");
  write_text(dir / "joint.json", joint.dump(2) + "\n");
}

}  // namespace textforge
