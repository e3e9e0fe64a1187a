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
#include <ostream>
#include <string>
#include <vector>

namespace qsl::cli {

struct SelftestOptions {
  std::uint64_t seed = 0;
  /// Test hook: added to the (1,2)/(2,1) drift entries of every system the suite
  /// builds. Any nonzero value must make the anchor checks fail.
  double drift_perturbation = 0.0;
};

struct SelftestCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Unitarity, anchor values, gradient checks, phase invariance and normalization
/// covariance on small instances. Random points are drawn from `seed`.
std::vector<SelftestCheck> run_selftest(const SelftestOptions& options);

/// Prints one line per check; returns true when all passed.
bool report_selftest(const std::vector<SelftestCheck>& checks, std::ostream& out);

}  // namespace qsl::cli
