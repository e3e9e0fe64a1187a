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

#include "qsl/mintime.hpp"

#include <cmath>
#include <sstream>

#include "qsl/errors.hpp"

namespace qsl {

MinTimeResult find_min_time(const ControlSystem& system, const CMatrix& goal,
                            const MinTimeConfig& config) {
  if (!(config.t_rel_tol > 0.0 && config.t_rel_tol < 1.0)) {
    throw InvalidArgument("find_min_time: t_rel_tol must lie in (0, 1)");
  }
  MinTimeResult result;
  result.bound_value = maximize_bound(goal, system, config.bound).value;
  const double t_init = config.t_init.value_or(result.bound_value);
  if (!(t_init > 0.0) || !std::isfinite(t_init)) {
    throw InvalidArgument("find_min_time: t_init must be positive and finite");
  }
  result.t_init = t_init;

  GrapeConfig grape = config.grape;
  grape.target_error = config.threshold;
  auto probe = [&](double t, const GrapeConfig& cfg) {
    ++result.evaluations;
    return grape_optimize(system, goal, t, cfg);
  };

  double t_lo = 0.0;
  double t_hi = t_init;
  GrapeResult success = probe(t_hi, grape);
  int doublings = 0;
  while (!success.converged) {
    if (doublings == config.max_doublings) {
      std::ostringstream msg;
      msg << "find_min_time: gate not reached within " << config.max_doublings
          << " doublings (last T = " << t_hi << ", best error " << success.final_error
          << ", threshold " << config.threshold << ")";
      throw UnreachableGate(msg.str());
    }
    t_lo = t_hi;
    t_hi *= 2.0;
    ++doublings;
    success = probe(t_hi, grape);
  }

  if (t_lo > 0.0) {
    GrapeConfig careful = grape;
    careful.restarts *= 2;
    while ((t_hi - t_lo) / t_hi > config.t_rel_tol) {
      const double mid = 0.5 * (t_lo + t_hi);
      GrapeResult r = probe(mid, careful);
      if (r.converged) {
        t_hi = mid;
        success = std::move(r);
      } else {
        t_lo = mid;
      }
    }
  }

  // Independent re-check of the returned schedule.
  const double verified = gate_error(goal, propagate(system, success.schedule));
  if (!(verified <= config.threshold)) {
    std::ostringstream msg;
    msg << "find_min_time: schedule at T = " << t_hi << " failed re-verification (error "
        << verified << ")";
    throw NumericalError(msg.str());
  }

  result.t_min = t_hi;
  result.t_lo = t_lo;
  result.t_hi = t_hi;
  result.error_at_t_min = verified;
  result.schedule = std::move(success.schedule);
  result.consistent = result.t_min >= result.bound_value - 2.0 * config.t_rel_tol * result.t_min;
  return result;
}

}  // namespace qsl
