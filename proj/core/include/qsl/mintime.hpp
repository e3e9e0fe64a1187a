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

#include <optional>

#include "qsl/bound.hpp"
#include "qsl/grape.hpp"

namespace qsl {

struct MinTimeConfig {
  double threshold = 1e-4;
  /// Starting duration; defaults to the maximized bound, which can never exceed the
  /// true minimum time.
  std::optional<double> t_init;
  double t_rel_tol = 0.02;
  int max_doublings = 20;
  GrapeConfig grape;
  BoundConfig bound;
};

struct MinTimeResult {
  double t_min = 0.0;
  double t_lo = 0.0;  // last failing duration (0 if the very first probe succeeded)
  double t_hi = 0.0;  // successful duration, equal to t_min
  double error_at_t_min = 0.0;
  int evaluations = 0;  // grape_optimize calls
  double bound_value = 0.0;
  double t_init = 0.0;
  /// t_min >= bound_value - 2 t_rel_tol t_min.
  bool consistent = true;
  PulseSchedule schedule;  // the successful schedule at t_min
};

/// Doubles T from t_init until GRAPE reaches the threshold, then bisects until
/// (t_hi - t_lo) / t_hi <= t_rel_tol. Restarts are doubled during bisection.
/// Throws UnreachableGate after max_doublings unsuccessful doublings.
MinTimeResult find_min_time(const ControlSystem& system, const CMatrix& goal,
                            const MinTimeConfig& config = {});

}  // namespace qsl
