// Copyright 2026 The TextForge Authors.
// SPDX-License-Identifier: Apache-2.0

#include "textforge/graph.hpp"

#include <array>

#include "textforge/binio.hpp"
#include "textforge/error.hpp"

namespace textforge {
namespace {

constexpr std::string_view kMagic = "TXGR";
using Dims = std::vector<std::int64_t>;

[[noreturn]] void corrupt(const std::string& msg) { throw Error(ErrorCode::CorruptGraph, msg); }

std::string dims_str(const Dims& d) {
  std::string s = "[";
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (i) s += ", ";
    s += d[i] == kSeq ? "L" : std::to_string(d[i]);
  }
  return s + "]";
}

class Checker {
 public:
  explicit Checker(const GraphOp& op) : op_(op) {}

  void arity(std::size_t lo, std::size_t hi) const {
    if (op_.inputs.size() < lo || op_.inputs.size() > hi) fail("takes " + std::to_string(lo) + ".." + std::to_string(hi) + " inputs");
    if (op_.outputs.size() != 1) fail("must have one output");
  }
  void attrs(std::size_t n) const {
    if (op_.attrs.size() != n) fail("expects " + std::to_string(n) + " attrs");
  }
  const SlotInfo& in(const std::map<std::string, SlotInfo>& slots, std::size_t i, SlotType type,
                     std::size_t rank = 0) const {
    const auto it = slots.find(op_.inputs[i]);
    if (it == slots.end()) fail("input '" + op_.inputs[i] + "' is not produced before use");
    if (it->second.type != type) fail("input '" + op_.inputs[i] + "' has the wrong type");
    if (rank && it->second.shape.size() != rank) {
      fail("input '" + op_.inputs[i] + "' has shape " + dims_str(it->second.shape));
    }
    return it->second;
  }
  void same(std::int64_t a, std::int64_t b, const char* what) const {
    if (a != b) fail(std::string(what) + " mismatch (" + std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
  [[noreturn]] void fail(const std::string& msg) const {
    corrupt(std::string(opcode_name(op_.opcode)) + " -> " +
            (op_.outputs.empty() ? std::string("?") : op_.outputs.front()) + ": " + msg);
  }

 private:
  const GraphOp& op_;
};

SlotInfo infer(const GraphOp& op, const std::map<std::string, SlotInfo>& s) {
  const Checker c(op);
  switch (op.opcode) {
    case Opcode::LookupTokens:
      c.arity(2, 2);
      c.attrs(0);
      c.in(s, 0, SlotType::Strings);
      c.in(s, 1, SlotType::Vocab);
      return {SlotType::Int, {kSeq}};
    case Opcode::LookupChars:
      c.arity(2, 2);
      c.attrs(1);
      c.in(s, 0, SlotType::Strings);
      c.in(s, 1, SlotType::Vocab);
      if (op.attrs[0] < 1) c.fail("max_chars must be >= 1");
      return {SlotType::Int, {kSeq, op.attrs[0]}};
    case Opcode::EmbedGather: {
      c.arity(2, 2);
      c.attrs(0);
      const auto& table = c.in(s, 0, SlotType::Float, 2);
      Dims out = c.in(s, 1, SlotType::Int).shape;
      out.push_back(table.shape[1]);
      return {SlotType::Float, out};
    }
    case Opcode::MatMulAdd: {
      c.arity(3, 3);
      c.attrs(0);
      const auto& x = c.in(s, 0, SlotType::Float, 2);
      const auto& w = c.in(s, 1, SlotType::Float, 2);
      const auto& b = c.in(s, 2, SlotType::Float, 1);
      c.same(x.shape[1], w.shape[0], "inner dim");
      c.same(b.shape[0], w.shape[1], "bias dim");
      return {SlotType::Float, {x.shape[0], w.shape[1]}};
    }
    case Opcode::Tanh:
    case Opcode::Sigmoid:
    case Opcode::Relu:
    case Opcode::Softmax: {
      c.arity(1, 1);
      c.attrs(0);
      const auto& x = c.in(s, 0, SlotType::Float, op.opcode == Opcode::Softmax ? 2 : 0);
      return {SlotType::Float, x.shape};
    }
    case Opcode::Conv1DMaxPool: {
      c.arity(3, 4);
      c.attrs(1);
      const auto& x = c.in(s, 0, SlotType::Float);
      const auto& f = c.in(s, 1, SlotType::Float, 3);
      const auto& b = c.in(s, 2, SlotType::Float, 1);
      if (x.shape.size() != 2 && x.shape.size() != 3) c.fail("x must be [L, d] or [b, t, d]");
      c.same(x.shape.back(), f.shape[1], "filter input dim");
      c.same(b.shape[0], f.shape[2], "bias dim");
      if (op.inputs.size() == 4) {
        if (x.shape.size() != 3) c.fail("char lengths need x [b, t, d]");
        const auto& ids = c.in(s, 3, SlotType::Int, 2);
        c.same(ids.shape[0], x.shape[0], "rows");
        c.same(ids.shape[1], x.shape[1], "steps");
      }
      if (x.shape.size() == 2) return {SlotType::Float, {1, f.shape[2]}};
      return {SlotType::Float, {x.shape[0], f.shape[2]}};
    }
    case Opcode::LSTMSeq: {
      c.arity(4, 4);
      c.attrs(1);
      const auto& x = c.in(s, 0, SlotType::Float, 2);
      const auto& wi = c.in(s, 1, SlotType::Float, 2);
      const auto& wh = c.in(s, 2, SlotType::Float, 2);
      const auto& b = c.in(s, 3, SlotType::Float, 1);
      const auto H = wh.shape[0];
      c.same(wi.shape[0], x.shape[1], "w_ih rows");
      c.same(wi.shape[1], 4 * H, "w_ih cols");
      c.same(wh.shape[1], 4 * H, "w_hh cols");
      c.same(b.shape[0], 4 * H, "bias");
      return {SlotType::Float, {x.shape[0], H}};
    }
    case Opcode::Concat: {
      c.arity(1, 64);
      c.attrs(0);
      Dims out = c.in(s, 0, SlotType::Float).shape;
      if (out.empty()) c.fail("scalar input");
      for (std::size_t i = 1; i < op.inputs.size(); ++i) {
        const auto& p = c.in(s, i, SlotType::Float, out.size());
        for (std::size_t a = 0; a + 1 < out.size(); ++a) c.same(p.shape[a], out[a], "leading dim");
        out.back() += p.shape.back();
      }
      return {SlotType::Float, out};
    }
    case Opcode::SelfAttention: {
      c.arity(3, 3);
      c.attrs(0);
      const auto& h = c.in(s, 0, SlotType::Float, 2);
      const auto& w1 = c.in(s, 1, SlotType::Float, 2);
      const auto& w2 = c.in(s, 2, SlotType::Float, 1);
      c.same(w1.shape[0], h.shape[1], "w1 rows");
      c.same(w2.shape[0], w1.shape[1], "w2 dim");
      return {SlotType::Float, {1, h.shape[1]}};
    }
    case Opcode::ArgMax: {
      c.arity(1, 1);
      c.attrs(0);
      const auto& x = c.in(s, 0, SlotType::Float, 2);
      return {SlotType::Int, {x.shape[0]}};
    }
    case Opcode::Highway: {
      c.arity(5, 5);
      c.attrs(0);
      const auto& x = c.in(s, 0, SlotType::Float, 2);
      const auto N = x.shape[1];
      for (std::size_t i : {1, 3}) {
        const auto& w = c.in(s, i, SlotType::Float, 2);
        c.same(w.shape[0], N, "weight rows");
        c.same(w.shape[1], N, "weight cols");
        c.same(c.in(s, i + 1, SlotType::Float, 1).shape[0], N, "bias");
      }
      return {SlotType::Float, x.shape};
    }
  }
  corrupt("unknown opcode " + std::to_string(static_cast<std::uint32_t>(op.opcode)));
}

void add_slot(std::map<std::string, SlotInfo>& slots, const std::string& name, SlotInfo info) {
  if (name.empty()) corrupt("empty slot name");
  if (!slots.emplace(name, std::move(info)).second) corrupt("slot '" + name + "' has two producers");
}

// Section encodings.

std::vector<std::uint8_t> encode_inputs(const StaticGraph& g) {
  binio::ByteWriter w;
  w.u32(static_cast<std::uint32_t>(g.inputs.size()));
  for (const auto& in : g.inputs) {
    w.str(in.name);
    w.u8(static_cast<std::uint8_t>(in.type));
    w.i64s(in.shape);
  }
  return w.take();
}

std::vector<std::uint8_t> encode_consts(const StaticGraph& g) {
  binio::ByteWriter w;
  w.u32(static_cast<std::uint32_t>(g.consts.size()));
  for (const auto& [name, c] : g.consts) {
    w.str(name);
    w.i64s(c.shape);
    w.f32s(c.values);
  }
  return w.take();
}

std::vector<std::uint8_t> encode_vocabs(const StaticGraph& g) {
  binio::ByteWriter w;
  w.u32(static_cast<std::uint32_t>(g.vocab_tables.size()));
  for (const auto& [name, entries] : g.vocab_tables) {
    w.str(name);
    w.strs(entries);
  }
  return w.take();
}

std::vector<std::uint8_t> encode_ops(const StaticGraph& g) {
  binio::ByteWriter w;
  w.u32(static_cast<std::uint32_t>(g.ops.size()));
  for (const auto& op : g.ops) {
    w.u32(static_cast<std::uint32_t>(op.opcode));
    w.strs(op.inputs);
    w.strs(op.outputs);
    w.i64s(op.attrs);
  }
  return w.take();
}

binio::ByteReader reader(const binio::Container& box, std::string_view name) {
  return binio::ByteReader(box.at(name, ErrorCode::CorruptGraph), ErrorCode::CorruptGraph);
}

void expect_done(const binio::ByteReader& r, std::string_view section) {
  if (!r.done()) corrupt("trailing bytes in section '" + std::string(section) + "'");
}

}  // namespace

std::string_view opcode_name(Opcode op) {
  static constexpr std::array<std::string_view, kOpcodeCount> names = {
      "LookupTokens", "LookupChars", "EmbedGather", "MatMulAdd", "Tanh",
      "Sigmoid",      "Relu",        "Conv1DMaxPool", "LSTMSeq", "Concat",
      "SelfAttention", "Softmax",    "ArgMax",      "Highway"};
  const auto i = static_cast<std::uint32_t>(op);
  return i < kOpcodeCount ? names[i] : std::string_view("?");
}

std::map<std::string, SlotInfo> validate_graph(const StaticGraph& g) {
  std::map<std::string, SlotInfo> slots;
  for (const auto& in : g.inputs) {
    if (in.type == SlotType::Float || in.type == SlotType::Vocab) corrupt("input '" + in.name + "' has an unsupported type");
    add_slot(slots, in.name, {in.type, in.shape});
  }
  for (const auto& [name, c] : g.consts) {
    std::int64_t n = 1;
    for (auto d : c.shape) {
      if (d < 0) corrupt("const '" + name + "' has a negative dim");
      n *= d;
    }
    if (n != static_cast<std::int64_t>(c.values.size())) corrupt("const '" + name + "' size does not match its shape");
    add_slot(slots, name, {SlotType::Float, c.shape});
  }
  for (const auto& [name, entries] : g.vocab_tables) {
    if (entries.size() < 2) corrupt("vocab table '" + name + "' lacks the special entries");
    add_slot(slots, name, {SlotType::Vocab, {}});
  }
  for (const auto& op : g.ops) {
    if (static_cast<std::uint32_t>(op.opcode) >= kOpcodeCount) {
      corrupt("unknown opcode " + std::to_string(static_cast<std::uint32_t>(op.opcode)));
    }
    SlotInfo out = infer(op, slots);
    add_slot(slots, op.outputs.front(), std::move(out));
  }
  if (g.outputs.size() != 2) corrupt("graph must expose labels and scores");
  const auto labels = slots.find(g.outputs[0]);
  const auto scores = slots.find(g.outputs[1]);
  if (labels == slots.end() || labels->second.type != SlotType::Int) corrupt("labels output missing");
  if (scores == slots.end() || scores->second.type != SlotType::Float || scores->second.shape.size() != 2) {
    corrupt("scores output missing");
  }
  return slots;
}

std::vector<std::uint8_t> serialize_graph(const StaticGraph& g) {
  binio::Container box;
  box.version = g.version;
  const std::string meta = g.meta.dump();
  box.sections.emplace_back("meta", std::vector<std::uint8_t>(meta.begin(), meta.end()));
  box.sections.emplace_back("inputs", encode_inputs(g));
  box.sections.emplace_back("consts", encode_consts(g));
  box.sections.emplace_back("vocabs", encode_vocabs(g));
  box.sections.emplace_back("ops", encode_ops(g));
  binio::ByteWriter out;
  out.strs(g.outputs);
  box.sections.emplace_back("outputs", out.take());
  return binio::write_container(kMagic, box, binio::CrcPlacement::Trailer);
}

StaticGraph deserialize_graph(std::span<const std::uint8_t> bytes) {
  const auto box = binio::read_container(bytes, kMagic, binio::CrcPlacement::Trailer, kGraphVersion,
                                         ErrorCode::CorruptGraph, ErrorCode::VersionMismatch);
  StaticGraph g;
  g.version = box.version;
  const auto& meta = box.at("meta", ErrorCode::CorruptGraph);
  try {
    g.meta = nlohmann::json::parse(meta.begin(), meta.end());
  } catch (const nlohmann::json::exception& e) {
    corrupt(std::string("meta: ") + e.what());
  }

  auto r = reader(box, "inputs");
  for (std::uint32_t n = r.u32(), i = 0; i < n; ++i) {
    GraphInput in;
    in.name = r.str();
    const auto t = r.u8();
    if (t > static_cast<std::uint8_t>(SlotType::Vocab)) corrupt("bad slot type");
    in.type = static_cast<SlotType>(t);
    in.shape = r.i64s();
    g.inputs.push_back(std::move(in));
  }
  expect_done(r, "inputs");

  r = reader(box, "consts");
  for (std::uint32_t n = r.u32(), i = 0; i < n; ++i) {
    std::string name = r.str();
    GraphConst c;
    c.shape = r.i64s();
    c.values = r.f32s();
    if (!g.consts.emplace(std::move(name), std::move(c)).second) corrupt("duplicate const");
  }
  expect_done(r, "consts");

  r = reader(box, "vocabs");
  for (std::uint32_t n = r.u32(), i = 0; i < n; ++i) {
    std::string name = r.str();
    if (!g.vocab_tables.emplace(std::move(name), r.strs()).second) corrupt("duplicate vocab table");
  }
  expect_done(r, "vocabs");

  r = reader(box, "ops");
  for (std::uint32_t n = r.u32(), i = 0; i < n; ++i) {
    GraphOp op;
    const auto code = r.u32();
    if (code >= kOpcodeCount) corrupt("unknown opcode " + std::to_string(code));
    op.opcode = static_cast<Opcode>(code);
    op.inputs = r.strs();
    op.outputs = r.strs();
    op.attrs = r.i64s();
    g.ops.push_back(std::move(op));
  }
  expect_done(r, "ops");

  r = reader(box, "outputs");
  g.outputs = r.strs();
  expect_done(r, "outputs");

  validate_graph(g);
  return g;
}

void save_graph(const StaticGraph& g, const std::filesystem::path& path) {
  validate_graph(g);
  binio::write_file(path, serialize_graph(g));
}

StaticGraph load_graph(const std::filesystem::path& path) { return deserialize_graph(binio::read_file(path)); }

}  // namespace textforge
