// Copyright 2026 The TextForge Authors.
// SPDX-License-Identifier: Apache-2.0

#include "textforge/data_handler.hpp"

#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "textforge/error.hpp"
#include "textforge/rng.hpp"

namespace textforge {
namespace {

std::vector<std::string> split_spaces(std::string_view s) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    while (pos < s.size() && s[pos] == ' ') ++pos;
    const std::size_t start = pos;
    while (pos < s.size() && s[pos] != ' ') ++pos;
    if (pos > start) out.emplace_back(s.substr(start, pos - start));
  }
  return out;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> cols;
  std::size_t pos = 0;
  while (true) {
    const auto tab = line.find('\t', pos);
    if (tab == std::string_view::npos) {
      cols.push_back(line.substr(pos));
      break;
    }
    cols.push_back(line.substr(pos, tab - pos));
    pos = tab + 1;
  }
  return cols;
}

[[noreturn]] void bad_line(const std::string& source, std::size_t line_no, const std::string& why) {
  throw Error(ErrorCode::MalformedData, source + ":" + std::to_string(line_no) + ": " + why);
}

}  // namespace

std::string_view split_name(Split s) {
  switch (s) {
    case Split::Train: return "train";
    case Split::Eval: return "eval";
    case Split::Test: return "test";
  }
  return "train";
}

Dataset parse_tsv(std::string_view content, TaskHead head, LabelFormat format, Split split,
                  const FeaturizerSettings& settings, const std::string& source_name) {
  Dataset ds;
  ds.split = split;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < content.size()) {
    auto nl = content.find('\n', pos);
    if (nl == std::string_view::npos) nl = content.size();
    std::string_view line = content.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;

    const auto cols = split_tabs(line);
    if (cols.size() < 2 || cols.size() > 3) {
      bad_line(source_name, line_no, "expected 'labels<TAB>text[<TAB>gazetteer]'");
    }
    Example ex;
    ex.text = std::string(cols[1]);
    try {
      if (cols.size() == 3) ex.gazetteer = parse_gazetteer_spec(cols[2]);
      ex.features = featurize(ex.text, ex.gazetteer, settings);
    } catch (const Error& e) {
      bad_line(source_name, line_no, e.what());
    }

    auto labels = split_spaces(cols[0]);
    const std::size_t n_tokens = ex.features.tokens.size();
    if (format == LabelFormat::Joint) {
      if (labels.empty()) bad_line(source_name, line_no, "missing document label");
      ex.doc_label = labels.front();
      labels.erase(labels.begin());
      if (labels.size() != n_tokens) {
        bad_line(source_name, line_no,
                 std::to_string(labels.size()) + " tags for " + std::to_string(n_tokens) + " tokens");
      }
      ex.word_labels = std::move(labels);
    } else if (head == TaskHead::Doc) {
      if (labels.size() != 1) bad_line(source_name, line_no, "expected exactly one document label");
      ex.doc_label = labels.front();
    } else {
      if (labels.size() != n_tokens) {
        bad_line(source_name, line_no,
                 std::to_string(labels.size()) + " tags for " + std::to_string(n_tokens) + " tokens");
      }
      ex.word_labels = std::move(labels);
    }
    ds.examples.push_back(std::move(ex));
  }
  return ds;
}

Dataset load_tsv(const std::filesystem::path& path, TaskHead head, LabelFormat format, Split split,
                 const FeaturizerSettings& settings) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::FileNotFound, "cannot open data file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_tsv(ss.str(), head, format, split, settings, path.string());
}

Vocabulary build_vocab(const Dataset& train, int min_freq) {
  if (train.examples.empty()) throw Error(ErrorCode::EmptyCorpus, "training split is empty");
  std::map<std::string, std::int64_t> counts;
  for (const auto& ex : train.examples) {
    for (const auto& tok : ex.features.tokens) ++counts[tok.text];
  }
  return Vocabulary::from_counts(counts, min_freq);
}

Vocabs build_vocabs(const std::vector<const Dataset*>& train_splits,
                    const std::vector<const Dataset*>& extra_label_splits, int min_freq) {
  std::map<std::string, std::int64_t> tokens, chars, gaz;
  std::vector<std::string> doc_labels, word_labels;
  std::size_t n_examples = 0;
  for (const Dataset* ds : train_splits) {
    for (const auto& ex : ds->examples) {
      ++n_examples;
      for (const auto& tok : ex.features.tokens) {
        ++tokens[tok.text];
        for (auto& ch : utf8_chars(tok.text)) ++chars[ch];
      }
      for (const auto& g : ex.features.gazetteer_labels) {
        ++gaz[g ? *g : std::string(kNoGazetteer)];
      }
    }
  }
  if (n_examples == 0) throw Error(ErrorCode::EmptyCorpus, "training split is empty");
  auto collect_labels = [&](const Dataset* ds) {
    for (const auto& ex : ds->examples) {
      if (ex.doc_label) doc_labels.push_back(*ex.doc_label);
      if (ex.word_labels) word_labels.insert(word_labels.end(), ex.word_labels->begin(),
                                             ex.word_labels->end());
    }
  };
  for (const Dataset* ds : train_splits) collect_labels(ds);
  for (const Dataset* ds : extra_label_splits) collect_labels(ds);

  Vocabs v;
  v.tokens = Vocabulary::from_counts(tokens, min_freq);
  v.chars = Vocabulary::from_counts(chars, 1);
  v.caps = capitalization_vocab();
  v.gazetteer = Vocabulary::from_counts(gaz, 1);
  v.doc_labels = LabelSet(std::move(doc_labels));
  v.word_labels = LabelSet(std::move(word_labels));
  return v;
}

std::vector<std::int32_t> numericalize(std::span<const std::string> tokens, const Vocabulary& vocab) {
  return vocab.numericalize(tokens);
}

NumericExample numericalize_example(const Example& ex, std::size_t example_id, const Vocabs& vocabs,
                                    const FeaturizerSettings& settings) {
  NumericExample n;
  n.example_id = example_id;
  const auto& f = ex.features;
  n.token_ids.reserve(f.tokens.size());
  for (std::size_t i = 0; i < f.tokens.size(); ++i) {
    n.token_ids.push_back(vocabs.tokens.id(f.tokens[i].text));
    auto row = char_ids(f.tokens[i].text, vocabs.chars, settings.max_chars);
    n.char_ids.insert(n.char_ids.end(), row.begin(), row.end());
    n.cap_ids.push_back(vocabs.caps.id(cap_feature_name(f.cap_features[i])));
    const auto& g = f.gazetteer_labels[i];
    n.gaz_ids.push_back(vocabs.gazetteer.id(g ? std::string_view(*g) : kNoGazetteer));
  }
  if (ex.doc_label) n.doc_label = vocabs.doc_labels.id(*ex.doc_label);
  if (ex.word_labels) {
    for (const auto& l : *ex.word_labels) n.word_labels.push_back(vocabs.word_labels.id(l));
  }
  return n;
}

std::vector<NumericExample> numericalize_dataset(const Dataset& ds, const Vocabs& vocabs,
                                                 const FeaturizerSettings& settings) {
  std::vector<NumericExample> out;
  out.reserve(ds.examples.size());
  for (std::size_t i = 0; i < ds.examples.size(); ++i) {
    out.push_back(numericalize_example(ds.examples[i], i, vocabs, settings));
  }
  return out;
}

Batch pack_batch(const std::vector<const NumericExample*>& examples, int max_chars) {
  Batch b;
  const auto B = static_cast<std::int64_t>(examples.size());
  std::int64_t T = 0;
  for (const auto* ex : examples) T = std::max<std::int64_t>(T, static_cast<std::int64_t>(ex->token_ids.size()));
  const std::int64_t C = max_chars;
  b.token_ids = IdTensor::zeros({B, T});
  b.char_ids = IdTensor::zeros({B, T, C});
  b.cap_ids = IdTensor::zeros({B, T});
  b.gaz_ids = IdTensor::zeros({B, T});
  b.mask.assign(static_cast<std::size_t>(B * T), 0);
  bool all_doc = B > 0, all_word = B > 0;
  for (const auto* ex : examples) {
    all_doc = all_doc && ex->doc_label >= 0;
    all_word = all_word && ex->word_labels.size() == ex->token_ids.size() &&
               (ex->has_word_labels());
  }
  if (all_doc) b.doc_labels.emplace();
  if (all_word) b.word_labels = IdTensor::zeros({B, T});
  for (std::int64_t i = 0; i < B; ++i) {
    const NumericExample& ex = *examples[static_cast<std::size_t>(i)];
    const auto len = static_cast<std::int64_t>(ex.token_ids.size());
    b.lengths.push_back(len);
    b.example_ids.push_back(ex.example_id);
    for (std::int64_t t = 0; t < len; ++t) {
      b.token_ids.data[i * T + t] = ex.token_ids[t];
      b.cap_ids.data[i * T + t] = ex.cap_ids[t];
      b.gaz_ids.data[i * T + t] = ex.gaz_ids[t];
      b.mask[i * T + t] = 1;
      std::copy_n(ex.char_ids.begin() + t * C, C, b.char_ids.data.begin() + (i * T + t) * C);
      if (all_word) b.word_labels->data[i * T + t] = ex.word_labels[t];
    }
    if (all_doc) b.doc_labels->push_back(ex.doc_label);
  }
  return b;
}

std::vector<Batch> make_batches(const std::vector<NumericExample>& examples, std::int64_t batch_size,
                                int max_chars, std::optional<std::uint64_t> shuffle_seed) {
  if (batch_size < 1) throw Error(ErrorCode::InvalidArgument, "batch_size must be >= 1");
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), 0);
  if (shuffle_seed) {
    Rng rng(*shuffle_seed);
    rng.shuffle(std::span<std::size_t>(order));
  }
  std::vector<Batch> batches;
  for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(batch_size)) {
    const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(batch_size));
    std::vector<const NumericExample*> group;
    for (std::size_t i = start; i < end; ++i) group.push_back(&examples[order[i]]);
    batches.push_back(pack_batch(group, max_chars));
  }
  return batches;
}

std::vector<Batch> interleave_multitask(const std::vector<std::vector<Batch>>& per_task) {
  if (per_task.size() < 2) {
    throw Error(ErrorCode::MultiTaskArity,
                "multi-task interleaving needs at least 2 sources, got " +
                    std::to_string(per_task.size()));
  }
  std::size_t longest = 0;
  for (const auto& batches : per_task) {
    if (batches.empty()) throw Error(ErrorCode::EmptySplit, "a multi-task source has no batches");
    longest = std::max(longest, batches.size());
  }
  std::vector<Batch> out;
  out.reserve(longest * per_task.size());
  for (std::size_t i = 0; i < longest; ++i) {
    for (std::size_t task = 0; task < per_task.size(); ++task) {
      Batch b = per_task[task][i % per_task[task].size()];
      b.task_id = static_cast<int>(task);
      out.push_back(std::move(b));
    }
  }
  return out;
}

std::vector<std::vector<std::int32_t>> unpad_token_ids(const Batch& batch) {
  std::vector<std::vector<std::int32_t>> rows;
  const auto T = batch.max_len();
  for (std::size_t i = 0; i < batch.lengths.size(); ++i) {
    const auto* row = batch.token_ids.data.data() + static_cast<std::int64_t>(i) * T;
    rows.emplace_back(row, row + batch.lengths[i]);
  }
  return rows;
}

}  // namespace textforge
