// Copyright 2026 The TextForge Authors.
// SPDX-License-Identifier: Apache-2.0

#include "textforge/optimizer.hpp"

#include <cmath>

#include "textforge/error.hpp"
#include "textforge/registry.hpp"

namespace textforge {

void Optimizer::step(const NamedTensors& params) {
  bool any = false;
  for (const auto& [name, t] : params) any = any || t.has_grad();
  if (!any) throw Error(ErrorCode::NoGradient, "no parameter received a gradient");
  for (auto [name, t] : params) {
    if (!t.has_grad()) continue;
    update(name, t.data(), t.grad());
    t.clear_grad();
  }
}

void Optimizer::write_state(binio::ByteWriter& w) const {
  w.str(kind());
  w.f32(lr_);
  write_extra(w);
}

void Optimizer::read_state(binio::ByteReader& r) {
  const auto k = r.str();
  if (k != kind()) {
    throw Error(ErrorCode::CorruptFile, "checkpoint optimizer is '" + k + "', config asks for '" + kind() + "'");
  }
  lr_ = r.f32();
  read_extra(r);
}

void Sgd::update(const std::string&, std::span<float> p, std::span<const float> g) {
  for (std::size_t i = 0; i < p.size(); ++i) p[i] -= lr_ * g[i];
}

void Adam::update(const std::string& name, std::span<float> p, std::span<const float> g) {
  Slot& s = slots_[name];
  if (s.m.size() != p.size()) {
    s.m.assign(p.size(), 0.0f);
    s.v.assign(p.size(), 0.0f);
    s.t = 0;
  }
  ++s.t;
  const double c1 = 1.0 - std::pow(static_cast<double>(beta1_), static_cast<double>(s.t));
  const double c2 = 1.0 - std::pow(static_cast<double>(beta2_), static_cast<double>(s.t));
  for (std::size_t i = 0; i < p.size(); ++i) {
    s.m[i] = beta1_ * s.m[i] + (1.0f - beta1_) * g[i];
    s.v[i] = beta2_ * s.v[i] + (1.0f - beta2_) * g[i] * g[i];
    const double m_hat = s.m[i] / c1;
    const double v_hat = s.v[i] / c2;
    p[i] -= static_cast<float>(lr_ * m_hat / (std::sqrt(v_hat) + eps_));
  }
}

void Adam::write_extra(binio::ByteWriter& w) const {
  w.f32(beta1_);
  w.f32(beta2_);
  w.f32(eps_);
  w.u64(slots_.size());
  for (const auto& [name, s] : slots_) {
    w.str(name);
    w.i64(s.t);
    w.f32s(s.m);
    w.f32s(s.v);
  }
}

void Adam::read_extra(binio::ByteReader& r) {
  beta1_ = r.f32();
  beta2_ = r.f32();
  eps_ = r.f32();
  slots_.clear();
  const auto n = r.u64();
  for (std::uint64_t i = 0; i < n; ++i) {
    auto name = r.str();
    Slot s;
    s.t = r.i64();
    s.m = r.f32s();
    s.v = r.f32s();
    if (s.m.size() != s.v.size()) throw Error(ErrorCode::CorruptFile, "adam moments differ in size");
    slots_.emplace(std::move(name), std::move(s));
  }
}

std::unique_ptr<Optimizer> make_optimizer(const ComponentConfig& cfg) {
  const auto lr = static_cast<float>(cfg.get_float("lr"));
  if (cfg.name == "sgd") return std::make_unique<Sgd>(lr);
  if (cfg.name == "adam") {
    return std::make_unique<Adam>(lr, static_cast<float>(cfg.get_float("beta1")),
                                  static_cast<float>(cfg.get_float("beta2")),
                                  static_cast<float>(cfg.get_float("eps")));
  }
  throw Error(ErrorCode::UnknownComponent, "no optimizer named '" + cfg.name + "'");
}

double clip_grad_norm(const NamedTensors& params, double max_norm) {
  double sq = 0.0;
  for (const auto& [name, t] : params) {
    for (float g : t.grad()) sq += static_cast<double>(g) * g;
  }
  const double norm = std::sqrt(sq);
  if (max_norm > 0.0 && norm > max_norm) {
    const auto s = static_cast<float>(max_norm / norm);
    for (auto [name, t] : params) {
      for (float& g : t.mutable_grad()) g *= s;
    }
  }
  return norm;
}

}  // namespace textforge
