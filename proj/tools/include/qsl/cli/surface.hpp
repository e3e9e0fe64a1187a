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
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qsl/bound.hpp"
#include "qsl/mintime.hpp"

namespace qsl::cli {

enum class SurfaceMode { kBound, kMintime, kBoth };

/// One (N, M) grid point of a sweep.
struct SweepRecord {
  int n = 0;
  int m = 0;
  double bound_value = 0.0;
  double analytic_anchor = 0.0;
  std::optional<double> t_min;
  std::optional<double> grape_error_at_t_min;
  std::uint64_t seed = 0;
  std::optional<double> wall_time_seconds;  // only with timing enabled
};

inline constexpr const char* kCsvHeader =
    "N,M,bound_value,analytic_anchor,t_min,grape_error_at_t_min,seed,wall_time_seconds";

struct SurfaceOptions {
  std::pair<int, int> n_range{2, 15};
  std::pair<int, int> m_range{1, 14};
  SurfaceMode mode = SurfaceMode::kBound;
  BoundConfig bound;
  MinTimeConfig mintime;  // its bound config is overwritten with `bound`
  int jobs = 1;
  double budget_seconds = 0.0;  // <= 0 means unlimited
  bool record_timing = false;
};

struct SurfaceOutcome {
  std::vector<SweepRecord> records;  // sorted by (N, M)
  bool budget_exceeded = false;
  int skipped = 0;
  std::vector<std::string> failures;  // numerical failures and invariant violations
};

/// Grid points (N, M) of the ranges with 1 <= M <= N - 1, ordered by (N, M).
std::vector<std::pair<int, int>> surface_grid(std::pair<int, int> n_range,
                                              std::pair<int, int> m_range);

SurfaceOutcome run_surface(const SurfaceOptions& options);

/// Invariant violations of a record (empty when it is valid).
std::vector<std::string> check_record(const SweepRecord& record);

void write_csv(const std::vector<SweepRecord>& records, std::ostream& out);
nlohmann::json records_to_json(const std::vector<SweepRecord>& records);

}  // namespace qsl::cli
