// Copyright 2026 The qsl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <functional>
#include <string_view>

#include <Eigen/Dense>

namespace qsl {

/// Value-and-gradient callback: returns f(x) and writes the gradient into `grad`
/// (already sized like x).
using ObjectiveFn = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& grad)>;

enum class QuasiNewtonMethod { kBfgs, kLbfgs };

enum class QuasiNewtonStatus {
  kGradientConverged,
  kStepConverged,
  kStalled,
  kStoppedByCallback,
  kMaxIterations,
  kLineSearchFailed,
};

std::string_view to_string(QuasiNewtonStatus status);

struct QuasiNewtonOptions {
  QuasiNewtonMethod method = QuasiNewtonMethod::kBfgs;
  int max_iters = 500;
  /// Stop when ||g||_inf <= grad_tol * (relative_gradient ? |f| : 1).
  double grad_tol = 1e-8;
  bool relative_gradient = false;
  /// Stop when ||x_{k+1} - x_k||_inf <= step_tol * max(1, ||x_k||_inf).
  double step_tol = 1e-14;
  /// Stop when the relative decrease over `stall_window` iterations is below stall_tol.
  int stall_window = 0;  // 0 disables
  double stall_tol = 1e-10;
  /// Length (in x) of the very first trial step along -g.
  double initial_step = 1.0;
  int lbfgs_history = 10;
  double wolfe_c1 = 1e-4;
  double wolfe_c2 = 0.9;
  int max_line_search = 40;
  /// Called at the start point and after every accepted step; returning true stops.
  std::function<bool(double f)> stop;
};

struct QuasiNewtonResult {
  Eigen::VectorXd x;
  double f = 0.0;
  double grad_inf_norm = 0.0;
  int iterations = 0;
  int evaluations = 0;
  QuasiNewtonStatus status = QuasiNewtonStatus::kMaxIterations;
};

/// Minimizes `objective` from `x0`. Every accepted step satisfies the strong Wolfe
/// conditions, so the returned f never exceeds f(x0).
///
/// The iteration is invariant under positive rescaling of the objective as long as
/// relative_gradient is set: the first step is normalized in x, the inverse Hessian
/// seed is the usual s'y / y'y scaling, and every other test is a ratio.
QuasiNewtonResult minimize(const ObjectiveFn& objective, const Eigen::VectorXd& x0,
                           const QuasiNewtonOptions& options);

}  // namespace qsl
