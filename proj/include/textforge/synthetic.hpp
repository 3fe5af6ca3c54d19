// Copyright 2026 The TextForge Authors.
// SPDX-License-Identifier: Apache-2.0

// Seeded toy corpora in the TSV format read by load_tsv.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace textforge {

struct ToyCorpus {
  std::string train, eval, test;  // TSV text
};

struct ToySizes {
  std::size_t train = 500, eval = 100, test = 100;
};

/// Five keywords, one per class; each document contains exactly one.
const std::vector<std::pair<std::string, std::string>>& toy_doc_keywords();
/// Ten slot words tagged B-slot; every other token is O.
const std::vector<std::string>& toy_slot_lexicon();

ToyCorpus toy_doc_corpus(std::uint64_t seed, ToySizes sizes = {});
ToyCorpus toy_tagging_corpus(std::uint64_t seed, ToySizes sizes = {});
/// Keyword-labelled documents that also contain slot words. `joint_format`
/// writes "<doc> <tags...>"; otherwise only the document label.
ToyCorpus toy_joint_corpus(std::uint64_t seed, bool joint_format, ToySizes sizes = {});

/// Writes doc_*, tag_*, joint_doc_* and joint_* train/eval/test files plus
/// ready-to-run configs (doc_cnn.json, doc_bilstm_attn.json, tagger.json,
/// joint.json) into `dir`.
void write_toy_workspace(const std::filesystem::path& dir, std::uint64_t seed, ToySizes sizes = {});

}  // namespace textforge
