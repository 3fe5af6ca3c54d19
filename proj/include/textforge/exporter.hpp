// Copyright 2026 The TextForge Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <utility>
#include <vector>

#include "textforge/featurizer.hpp"
#include "textforge/graph.hpp"
#include "textforge/models.hpp"
#include "textforge/vocab.hpp"

namespace textforge {

/// Lowers one head to an id-input graph. Consts are named by parameter path
/// relative to the head. Throws UnsupportedModule for layers with no lowering.
StaticGraph export_head(const SingleTaskModel& model, const Vocabs& vocabs,
                        const FeaturizerSettings& settings);

/// Replaces the id inputs with string inputs plus lookup ops over baked
/// vocabulary tables. Throws VocabAlreadyBaked on a baked graph.
StaticGraph prepend_vocab(StaticGraph graph, const Vocabs& vocabs);

/// One graph per head, baked when requested.
std::vector<std::pair<HeadKind, StaticGraph>> export_model(const TaskModel& model, const Vocabs& vocabs,
                                                           const FeaturizerSettings& settings, bool bake);

/// "<stem>.<head><ext>" for multi-head exports; `path` itself otherwise.
std::filesystem::path head_graph_path(const std::filesystem::path& path, HeadKind head, bool multi_head);

}  // namespace textforge
