// Copyright 2026 The TextForge Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "textforge/binio.hpp"
#include "textforge/modules.hpp"

namespace textforge {

struct ComponentConfig;

/// Updates parameters that carry a gradient, then drops every gradient.
/// Parameters without a gradient (e.g. another task's head) are untouched.
class Optimizer {
 public:
  explicit Optimizer(float lr) : lr_(lr) {}
  virtual ~Optimizer() = default;

  virtual std::string kind() const = 0;
  /// Throws NoGradient when no parameter has a gradient.
  void step(const NamedTensors& params);

  float lr() const { return lr_; }

  void write_state(binio::ByteWriter& w) const;
  /// Restores state written by an optimizer of the same kind.
  void read_state(binio::ByteReader& r);

 protected:
  virtual void update(const std::string& name, std::span<float> p, std::span<const float> g) = 0;
  virtual void write_extra(binio::ByteWriter& w) const = 0;
  virtual void read_extra(binio::ByteReader& r) = 0;

  float lr_;
};

/// p <- p - lr * g
class Sgd : public Optimizer {
 public:
  explicit Sgd(float lr) : Optimizer(lr) {}
  std::string kind() const override { return "sgd"; }

 protected:
  void update(const std::string& name, std::span<float> p, std::span<const float> g) override;
  void write_extra(binio::ByteWriter&) const override {}
  void read_extra(binio::ByteReader&) override {}
};

/// Bias-corrected Adam; moments and step counts are kept per parameter.
class Adam : public Optimizer {
 public:
  Adam(float lr, float beta1, float beta2, float eps)
      : Optimizer(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}
  std::string kind() const override { return "adam"; }

  struct Slot {
    std::int64_t t = 0;
    std::vector<float> m, v;
    bool operator==(const Slot&) const = default;
  };
  const std::map<std::string, Slot>& slots() const { return slots_; }

 protected:
  void update(const std::string& name, std::span<float> p, std::span<const float> g) override;
  void write_extra(binio::ByteWriter& w) const override;
  void read_extra(binio::ByteReader& r) override;

 private:
  float beta1_, beta2_, eps_;
  std::map<std::string, Slot> slots_;
};

std::unique_ptr<Optimizer> make_optimizer(const ComponentConfig& cfg);

/// Scales all gradients so their global L2 norm is at most max_norm.
/// Returns the norm before scaling.
double clip_grad_norm(const NamedTensors& params, double max_norm);

}  // namespace textforge
