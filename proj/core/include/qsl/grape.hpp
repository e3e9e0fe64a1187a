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

#include <cstdint>

#include "qsl/linalg.hpp"
#include "qsl/model.hpp"

namespace qsl {

/// Piecewise-constant control fields: amplitudes(k, s) drives control k during slot s.
/// Slot s covers [s dt, (s + 1) dt) with dt = total_time / n_slots.
struct PulseSchedule {
  double total_time = 0.0;
  int n_slots = 0;
  Eigen::MatrixXd amplitudes;  // num_controls x n_slots

  double slot_duration() const { return total_time / n_slots; }

  /// Zero fields for the given shape.
  static PulseSchedule zeros(double total_time, int n_slots, int num_controls);

  /// Throws InvalidArgument unless T > 0, n_slots >= 1, the shape is
  /// num_controls x n_slots and every amplitude is finite.
  void validate(int num_controls) const;
};

/// max(40, ceil(10 T)).
int default_slot_count(double total_time);

/// U(T) = X_n ... X_1 with X_s = exp(-i dt (H0 + sum_k f_k[s] H_k)); the rightmost
/// factor is the earliest slot.
CMatrix propagate(const ControlSystem& system, const PulseSchedule& schedule);

/// ||G - U||_HS / sqrt(2N). Phase sensitive; lies in [0, sqrt(2)] for unitaries.
double gate_error(const CMatrix& goal, const CMatrix& u);

/// Squared gate error of `schedule` and, when `grad` is non-null, its exact gradient
/// with respect to every amplitude (shape num_controls x n_slots).
double grape_cost(const ControlSystem& system, const CMatrix& goal, const PulseSchedule& schedule,
                  Eigen::MatrixXd* grad);

/// d(eps^2)/d amplitudes(k, s).
Eigen::MatrixXd grape_gradient(const ControlSystem& system, const CMatrix& goal,
                               const PulseSchedule& schedule);

struct GrapeConfig {
  int n_slots = 0;  // 0 selects default_slot_count(T)
  int restarts = 8;
  int max_iters = 500;
  double target_error = 1e-4;
  double grad_tol = 1e-10;
  /// Stop a restart whose eps^2 decreased by less than stall_tol (relative) over
  /// stall_window iterations; 0 disables.
  int stall_window = 50;
  double stall_tol = 1e-3;
  std::uint64_t seed = 0;
  double amp_init_scale = 1.0;
  /// Skip the remaining restarts once one reaches the target.
  bool stop_on_success = true;
  int jobs = 1;
};

struct GrapeResult {
  double final_error = 0.0;
  PulseSchedule schedule;
  int iterations = 0;
  bool converged = false;
  int restart_index = 0;
  int restarts_run = 0;
  long evaluations = 0;
};

/// Multi-start L-BFGS minimization of eps^2 over unconstrained amplitudes.
///
/// The returned restart is the lowest-index one that reached target_error, or the
/// one with the smallest error (lowest index on ties) when none did. With
/// stop_on_success, restarts run in waves of `jobs` and stop after the first wave
/// containing a success; the selected restart does not depend on `jobs`.
GrapeResult grape_optimize(const ControlSystem& system, const CMatrix& goal, double total_time,
                           const GrapeConfig& config = {});

}  // namespace qsl
