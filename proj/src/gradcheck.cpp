// Copyright 2026 The TextForge Authors.
// SPDX-License-Identifier: Apache-2.0

#include "textforge/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace textforge {
namespace {

FiniteDiffReport run_check(const ScalarFn& f, Tensor x, float eps, bool skip_kinks) {
  const bool had_grad_flag = x.requires_grad();
  x.set_requires_grad(true);
  x.clear_grad();
  Tensor loss = f(x);
  backward(loss);
  std::vector<float> analytic(x.grad().begin(), x.grad().end());
  if (analytic.empty()) analytic.assign(static_cast<std::size_t>(x.numel()), 0.0f);
  x.clear_grad();

  std::uint64_t base_decisions = 0;
  if (skip_kinks) {
    NoGradGuard no_grad;
    decisions::begin();
    (void)f(x);
    base_decisions = decisions::end();
  }

  FiniteDiffReport report;
  auto values = x.data();
  for (std::size_t i = 0; i < values.size(); ++i) {
    const float orig = values[i];
    NoGradGuard no_grad;
    values[i] = orig + eps;
    if (skip_kinks) decisions::begin();
    const double plus = f(x).item();
    const std::uint64_t d_plus = skip_kinks ? decisions::end() : 0;
    values[i] = orig - eps;
    if (skip_kinks) decisions::begin();
    const double minus = f(x).item();
    const std::uint64_t d_minus = skip_kinks ? decisions::end() : 0;
    values[i] = orig;
    if (skip_kinks && (d_plus != base_decisions || d_minus != base_decisions)) {
      ++report.skipped_kinks;
      continue;
    }
    // Use the step actually represented in float32.
    const double step = static_cast<double>(orig + eps) - static_cast<double>(orig - eps);
    const double numeric = (plus - minus) / step;
    const double err = std::abs(static_cast<double>(analytic[i]) - numeric) /
                       std::max(1.0, std::abs(numeric));
    report.max_rel_error = std::max(report.max_rel_error, err);
    ++report.checked;
  }
  x.set_requires_grad(had_grad_flag);
  return report;
}

}  // namespace

double finite_diff_check(const ScalarFn& f, Tensor x, float eps) {
  return run_check(f, std::move(x), eps, false).max_rel_error;
}

FiniteDiffReport finite_diff_check_smooth(const ScalarFn& f, Tensor x, float eps) {
  return run_check(f, std::move(x), eps, true);
}

}  // namespace textforge
