// Copyright 2026 The TextForge Authors.
// SPDX-License-Identifier: Apache-2.0

#include "textforge/checkpoint.hpp"

#include "textforge/binio.hpp"
#include "textforge/error.hpp"

namespace textforge {
namespace {

constexpr std::string_view kMagic = "TXFG";

std::vector<std::uint8_t> to_bytes(const std::string& s) { return {s.begin(), s.end()}; }

nlohmann::json parse_json(const std::vector<std::uint8_t>& bytes, const char* what) {
  try {
    return nlohmann::json::parse(bytes.begin(), bytes.end());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::CorruptFile, std::string(what) + ": " + e.what());
  }
}

}  // namespace

nlohmann::json history_to_json(const std::vector<EpochRecord>& history) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : history) {
    out.push_back({{"epoch", r.epoch}, {"train_loss", r.train_loss}, {"metric", r.metric}, {"eval", r.eval}});
  }
  return out;
}

std::vector<std::uint8_t> serialize_checkpoint(const Checkpoint& c) {
  binio::Container box;
  box.version = kCheckpointVersion;
  box.sections.emplace_back("config", to_bytes(c.config));

  binio::ByteWriter v;
  c.vocabs.write(v);
  box.sections.emplace_back("vocabs", v.take());

  binio::ByteWriter p;
  write_tensors(p, c.params);
  box.sections.emplace_back("params", p.take());

  binio::ByteWriter b;
  write_tensors(b, c.best_params);
  box.sections.emplace_back("best_params", b.take());

  box.sections.emplace_back("optimizer", c.optimizer_state);

  nlohmann::json state = {{"epoch", c.epoch},
                          {"best_epoch", c.best_epoch},
                          {"epochs_without_improvement", c.epochs_without_improvement},
                          {"history", history_to_json(c.history)}};
  state["best_metric"] = c.best_metric ? nlohmann::json(*c.best_metric) : nlohmann::json(nullptr);
  box.sections.emplace_back("state", to_bytes(state.dump()));
  return binio::write_container(kMagic, box, binio::CrcPlacement::Header);
}

Checkpoint deserialize_checkpoint(std::span<const std::uint8_t> bytes) {
  const auto box = binio::read_container(bytes, kMagic, binio::CrcPlacement::Header, kCheckpointVersion,
                                         ErrorCode::CorruptFile, ErrorCode::VersionMismatch);
  Checkpoint c;
  const auto& cfg = box.at("config", ErrorCode::CorruptFile);
  c.config.assign(cfg.begin(), cfg.end());

  binio::ByteReader v(box.at("vocabs", ErrorCode::CorruptFile), ErrorCode::CorruptFile);
  c.vocabs = Vocabs::read(v);
  binio::ByteReader p(box.at("params", ErrorCode::CorruptFile), ErrorCode::CorruptFile);
  c.params = read_tensors(p);
  binio::ByteReader b(box.at("best_params", ErrorCode::CorruptFile), ErrorCode::CorruptFile);
  c.best_params = read_tensors(b);
  c.optimizer_state = box.at("optimizer", ErrorCode::CorruptFile);

  const auto state = parse_json(box.at("state", ErrorCode::CorruptFile), "checkpoint state");
  try {
    c.epoch = state.at("epoch");
    c.best_epoch = state.at("best_epoch");
    c.epochs_without_improvement = state.at("epochs_without_improvement");
    if (!state.at("best_metric").is_null()) c.best_metric = state.at("best_metric").get<double>();
    for (const auto& r : state.at("history")) {
      c.history.push_back({r.at("epoch"), r.at("train_loss"), r.at("metric"), r.at("eval")});
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::CorruptFile, std::string("checkpoint state: ") + e.what());
  }
  return c;
}

void save_checkpoint(const Checkpoint& c, const std::filesystem::path& path) {
  binio::write_file(path, serialize_checkpoint(c));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  return deserialize_checkpoint(binio::read_file(path));
}

}  // namespace textforge
