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

#include "qsl/cli/surface.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <mutex>

#include "qsl/cli/format.hpp"
#include "qsl/errors.hpp"
#include "qsl/parallel.hpp"

namespace qsl::cli {
namespace {

using Clock = std::chrono::steady_clock;

std::string optional_number(const std::optional<double>& v) {
  return v ? format_number(*v) : std::string();
}

nlohmann::json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::json(round_significant(*v)) : nlohmann::json(nullptr);
}

}  // namespace

std::vector<std::pair<int, int>> surface_grid(std::pair<int, int> n_range,
                                              std::pair<int, int> m_range) {
  std::vector<std::pair<int, int>> grid;
  for (int n = std::max(2, n_range.first); n <= n_range.second; ++n) {
    for (int m = std::max(1, m_range.first); m <= std::min(m_range.second, n - 1); ++m) {
      grid.emplace_back(n, m);
    }
  }
  return grid;
}

std::vector<std::string> check_record(const SweepRecord& r) {
  std::vector<std::string> problems;
  const std::string where = "N=" + std::to_string(r.n) + " M=" + std::to_string(r.m) + ": ";
  if (!(r.bound_value >= r.analytic_anchor - 1e-9)) {
    problems.push_back(where + "bound " + format_number(r.bound_value) + " below anchor " +
                       format_number(r.analytic_anchor));
  }
  if (r.t_min && !(*r.t_min >= r.bound_value * (1.0 - 0.05))) {
    problems.push_back(where + "t_min " + format_number(*r.t_min) + " below 0.95 * bound " +
                       format_number(r.bound_value));
  }
  return problems;
}

SurfaceOutcome run_surface(const SurfaceOptions& options) {
  const auto grid = surface_grid(options.n_range, options.m_range);
  const auto start = Clock::now();
  std::vector<std::optional<SweepRecord>> slots(grid.size());
  std::atomic<bool> over_budget{false};
  std::mutex failures_mutex;
  SurfaceOutcome outcome;

  parallel_for(static_cast<int>(grid.size()), options.jobs, [&](int i) {
    if (options.budget_seconds > 0.0 &&
        std::chrono::duration<double>(Clock::now() - start).count() > options.budget_seconds) {
      over_budget = true;
      return;
    }
    const auto [n, m] = grid[i];
    const auto point_start = Clock::now();
    const ControlSystem system = make_chain_system(n, m);
    const CMatrix goal = build_swap_goal(n);
    SweepRecord record;
    record.n = n;
    record.m = m;
    record.analytic_anchor = analytic_reference(n);
    record.seed = options.bound.seed;
    try {
      if (options.mode == SurfaceMode::kBound) {
        record.bound_value = maximize_bound(goal, system, options.bound).value;
      } else {
        MinTimeConfig config = options.mintime;
        config.bound = options.bound;
        const MinTimeResult r = find_min_time(system, goal, config);
        record.bound_value = r.bound_value;
        record.t_min = r.t_min;
        record.grape_error_at_t_min = r.error_at_t_min;
      }
    } catch (const UnreachableGate& e) {
      // Keep the bound so the row is still useful; t_min stays empty.
      record.bound_value = maximize_bound(goal, system, options.bound).value;
      std::lock_guard<std::mutex> lock(failures_mutex);
      outcome.failures.push_back(e.what());
    }
    if (options.record_timing) {
      record.wall_time_seconds = std::chrono::duration<double>(Clock::now() - point_start).count();
    }
    slots[i] = record;
  });

  for (auto& slot : slots) {
    if (!slot) {
      ++outcome.skipped;
      continue;
    }
    for (auto& problem : check_record(*slot)) outcome.failures.push_back(std::move(problem));
    outcome.records.push_back(*slot);
  }
  outcome.budget_exceeded = over_budget.load();
  std::sort(outcome.failures.begin(), outcome.failures.end());
  return outcome;
}

void write_csv(const std::vector<SweepRecord>& records, std::ostream& out) {
  out << kCsvHeader << '\n';
  for (const auto& r : records) {
    out << r.n << ',' << r.m << ',' << format_number(r.bound_value) << ','
        << format_number(r.analytic_anchor) << ',' << optional_number(r.t_min) << ','
        << optional_number(r.grape_error_at_t_min) << ',' << r.seed << ','
        << optional_number(r.wall_time_seconds) << '\n';
  }
}

nlohmann::json records_to_json(const std::vector<SweepRecord>& records) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : records) {
    out.push_back({{"N", r.n},
                   {"M", r.m},
                   {"bound_value", round_significant(r.bound_value)},
                   {"analytic_anchor", round_significant(r.analytic_anchor)},
                   {"t_min", optional_json(r.t_min)},
                   {"grape_error_at_t_min", optional_json(r.grape_error_at_t_min)},
                   {"seed", r.seed},
                   {"wall_time_seconds", optional_json(r.wall_time_seconds)}});
  }
  return out;
}

}  // namespace qsl::cli
