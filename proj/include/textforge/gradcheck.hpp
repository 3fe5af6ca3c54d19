// Copyright 2026 The TextForge Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>

#include "textforge/tensor.hpp"

namespace textforge {

/// Scalar-valued function of the tensor under test. It is re-evaluated with
/// perturbed values of `x`, so it must read `x` on every call.
using ScalarFn = std::function<Tensor(const Tensor& x)>;

struct FiniteDiffReport {
  double max_rel_error = 0.0;
  std::size_t checked = 0;
  /// Components whose +/-eps probe crossed a relu or max-pool switch; the
  /// central difference is meaningless there, so they are not scored.
  std::size_t skipped_kinks = 0;
};

/// Central differences against autodiff gradients of f at x. Returns
/// max over components of |g_ad - g_fd| / max(1, |g_fd|).
double finite_diff_check(const ScalarFn& f, Tensor x, float eps);

/// Same comparison, excluding components whose probes change a discrete
/// branch decision of the forward pass.
FiniteDiffReport finite_diff_check_smooth(const ScalarFn& f, Tensor x, float eps);

}  // namespace textforge
