// Copyright 2026 The TextForge Authors.
// SPDX-License-Identifier: Apache-2.0

// Static inference graph: typed slots, constant weights, optional vocabulary
// tables and a topologically ordered op list over single-example inputs.
//
// Shapes are symbolic in the sequence length L (the example's token count,
// widened to 1 for empty input). kSeq stands for L in declared shapes.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace textforge {

inline constexpr std::uint32_t kGraphVersion = 1;
inline constexpr std::int64_t kSeq = -1;

enum class SlotType : std::uint8_t { Float = 0, Int = 1, Strings = 2, Vocab = 3 };

enum class Opcode : std::uint32_t {
  LookupTokens = 0,   // (strings, vocab) -> int [L]
  LookupChars = 1,    // (strings, vocab) -> int [L, max_chars]; attrs {max_chars}
  EmbedGather = 2,    // (table, ids) -> float ids.shape + [d]
  MatMulAdd = 3,      // (x[M,K], w[K,N], b[N]) -> [M,N]
  Tanh = 4,
  Sigmoid = 5,
  Relu = 6,
  Conv1DMaxPool = 7,  // (x, filters, bias[, char ids]) ; attrs {relu}
  LSTMSeq = 8,        // (x[L,D], w_ih, w_hh, bias) -> [L,H]; attrs {reverse}
  Concat = 9,         // last axis
  SelfAttention = 10, // (h[L,H], w1, w2) -> [1,H]
  Softmax = 11,
  ArgMax = 12,        // float [M,C] -> int [M]
  Highway = 13,       // (x, w1, b1, w2, b2) -> x.shape
};
inline constexpr std::uint32_t kOpcodeCount = 14;

std::string_view opcode_name(Opcode op);

struct GraphOp {
  Opcode opcode = Opcode::Relu;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::vector<std::int64_t> attrs;

  bool operator==(const GraphOp&) const = default;
};

struct GraphInput {
  std::string name;
  SlotType type = SlotType::Int;
  std::vector<std::int64_t> shape;  // may contain kSeq; empty for strings

  bool operator==(const GraphInput&) const = default;
};

struct GraphConst {
  std::vector<std::int64_t> shape;
  std::vector<float> values;

  bool operator==(const GraphConst&) const = default;
};

struct StaticGraph {
  std::uint32_t version = kGraphVersion;
  nlohmann::json meta = nlohmann::json::object();  // featurizer, head, labels
  std::vector<GraphInput> inputs;
  std::map<std::string, GraphConst> consts;
  std::map<std::string, std::vector<std::string>> vocab_tables;
  std::vector<GraphOp> ops;
  std::vector<std::string> outputs;  // {labels, scores}

  bool baked() const { return !vocab_tables.empty(); }
  bool operator==(const StaticGraph&) const = default;
};

/// Resolved type and symbolic shape of every slot.
struct SlotInfo {
  SlotType type = SlotType::Float;
  std::vector<std::int64_t> shape;
};

/// Checks topology (every input produced earlier, one producer per slot) and
/// infers shapes. Throws CorruptGraph on any violation.
std::map<std::string, SlotInfo> validate_graph(const StaticGraph& g);

std::vector<std::uint8_t> serialize_graph(const StaticGraph& g);
/// Throws CorruptGraph (magic, checksum, truncation, bad op) or VersionMismatch.
StaticGraph deserialize_graph(std::span<const std::uint8_t> bytes);

void save_graph(const StaticGraph& g, const std::filesystem::path& path);
StaticGraph load_graph(const std::filesystem::path& path);

}  // namespace textforge
