// Copyright 2026 The TextForge Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "textforge/featurizer.hpp"
#include "textforge/tensor.hpp"
#include "textforge/vocab.hpp"

namespace textforge {

enum class Split { Train, Eval, Test };
std::string_view split_name(Split s);

/// Which head a data source feeds.
enum class TaskHead { Doc, Word };

/// How the label column of a TSV line is laid out.
///   Single: the head's own labels (one doc label, or one tag per token)
///   Joint:  "<doc_label> <tag_1> ... <tag_n>"
enum class LabelFormat { Single, Joint };

struct Example {
  std::string text;
  std::vector<GazetteerEntry> gazetteer;
  std::optional<std::string> doc_label;
  std::optional<std::vector<std::string>> word_labels;
  FeaturizedExample features;  // char ids not yet filled
};

struct Dataset {
  std::vector<Example> examples;
  Split split = Split::Train;
};

/// Ids for one example, ready to be packed into batches.
struct NumericExample {
  std::size_t example_id = 0;
  std::vector<std::int32_t> token_ids;
  std::vector<std::int32_t> char_ids;  // [len * max_chars]
  std::vector<std::int32_t> cap_ids;
  std::vector<std::int32_t> gaz_ids;
  std::int32_t doc_label = -1;           // -1: none
  std::vector<std::int32_t> word_labels;  // empty when absent

  bool has_word_labels() const { return !word_labels.empty() || token_ids.empty(); }
};

struct Batch {
  IdTensor token_ids;  // [b, t]
  IdTensor char_ids;   // [b, t, max_chars]
  IdTensor cap_ids;    // [b, t]
  IdTensor gaz_ids;    // [b, t]
  std::vector<std::int64_t> lengths;
  std::vector<std::uint8_t> mask;  // [b * t]; 1 iff position < length
  std::optional<std::vector<std::int32_t>> doc_labels;
  std::optional<IdTensor> word_labels;  // [b, t]; 0 at padding
  int task_id = 0;
  std::vector<std::size_t> example_ids;

  std::int64_t batch_size() const { return static_cast<std::int64_t>(lengths.size()); }
  std::int64_t max_len() const { return token_ids.shape.empty() ? 0 : token_ids.dim(1); }
};

/// Parses one TSV dataset: label(s) TAB text [TAB gazetteer-spec].
Dataset load_tsv(const std::filesystem::path& path, TaskHead head, LabelFormat format,
                 Split split, const FeaturizerSettings& settings);

/// Parses TSV text already in memory (same format as load_tsv).
Dataset parse_tsv(std::string_view content, TaskHead head, LabelFormat format, Split split,
                  const FeaturizerSettings& settings, const std::string& source_name = "<memory>");

/// Token vocabulary over the featurized training split.
Vocabulary build_vocab(const Dataset& train, int min_freq);

/// All vocabularies from the training splits; label sets also see `extra`
/// splits so evaluation labels are representable.
Vocabs build_vocabs(const std::vector<const Dataset*>& train_splits,
                    const std::vector<const Dataset*>& extra_label_splits, int min_freq);

std::vector<std::int32_t> numericalize(std::span<const std::string> tokens, const Vocabulary& vocab);

NumericExample numericalize_example(const Example& ex, std::size_t example_id,
                                    const Vocabs& vocabs, const FeaturizerSettings& settings);

std::vector<NumericExample> numericalize_dataset(const Dataset& ds, const Vocabs& vocabs,
                                                 const FeaturizerSettings& settings);

/// Splits examples into batches padded to each batch's max length. With no
/// seed, dataset order is kept; with a seed, order is a seeded permutation.
std::vector<Batch> make_batches(const std::vector<NumericExample>& examples, std::int64_t batch_size,
                                int max_chars, std::optional<std::uint64_t> shuffle_seed);

/// Packs examples (in the given order) into one batch.
Batch pack_batch(const std::vector<const NumericExample*>& examples, int max_chars);

/// Round-robin over per-task batch lists. The epoch ends when the longest
/// list is exhausted; shorter lists cycle. Each batch is tagged with its task.
std::vector<Batch> interleave_multitask(const std::vector<std::vector<Batch>>& per_task);

/// Inverse of padding: the numericalized token ids of each row.
std::vector<std::vector<std::int32_t>> unpad_token_ids(const Batch& batch);

}  // namespace textforge
