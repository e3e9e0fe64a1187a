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
#include <numbers>

#include <gtest/gtest.h>

#include "qsl/errors.hpp"

namespace qsl {
namespace {

TEST(FindMinTime, TwoLevelSwap) {
  const ControlSystem sys = make_chain_system(2, 1);
  const CMatrix g = build_swap_goal(2);
  const MinTimeResult r = find_min_time(sys, g);
  EXPECT_GE(r.t_min, std::sqrt(2.0) - 1e-9);
  EXPECT_GE(r.bound_value, std::sqrt(2.0) - 1e-9);
  EXPECT_LT(r.t_lo, r.t_min);
  EXPECT_EQ(r.t_min, r.t_hi);
  EXPECT_LE((r.t_hi - r.t_lo) / r.t_hi, 0.02);
  EXPECT_LE(r.error_at_t_min, 1e-4);
  EXPECT_TRUE(r.consistent);
  // Free evolution alone realizes the gate at pi / sqrt(2), so the search must not
  // land far above it.
  EXPECT_LE(r.t_min, std::numbers::pi / std::sqrt(2.0) * 1.05);
  EXPECT_NEAR(gate_error(g, propagate(sys, r.schedule)), r.error_at_t_min, 1e-15);
}

TEST(FindMinTime, TrivialThresholdReturnsStartingTime) {
  MinTimeConfig config;
  config.threshold = 2.0;
  const MinTimeResult r = find_min_time(make_chain_system(4, 2), build_swap_goal(4), config);
  EXPECT_EQ(r.t_min, r.t_init);
  EXPECT_EQ(r.t_init, r.bound_value);
  EXPECT_EQ(r.evaluations, 1);
  EXPECT_EQ(r.t_lo, 0.0);
}

TEST(FindMinTime, Deterministic) {
  MinTimeConfig config;
  config.grape.seed = 5;
  const ControlSystem sys = make_chain_system(2, 1);
  const MinTimeResult a = find_min_time(sys, build_swap_goal(2), config);
  const MinTimeResult b = find_min_time(sys, build_swap_goal(2), config);
  EXPECT_EQ(a.t_min, b.t_min);
  EXPECT_EQ(a.evaluations, b.evaluations);
}

TEST(FindMinTime, MoreControlsAreNotSlower) {
  const CMatrix g = build_swap_goal(3);
  const MinTimeResult one = find_min_time(make_chain_system(3, 1), g);
  const MinTimeResult two = find_min_time(make_chain_system(3, 2), g);
  EXPECT_LE(two.t_min, one.t_min * 1.02);
  EXPECT_TRUE(one.consistent);
  EXPECT_TRUE(two.consistent);
}

TEST(FindMinTime, StartingBelowTheBoundStillRespectsIt) {
  const ControlSystem sys = make_chain_system(3, 2);
  const CMatrix g = build_swap_goal(3);
  MinTimeConfig config;
  config.t_init = 0.5 * maximize_bound(g, sys).value;
  const MinTimeResult r = find_min_time(sys, g, config);
  EXPECT_GE(r.t_min, r.bound_value * 0.95);
  EXPECT_GT(r.t_lo, 0.0);
}

TEST(FindMinTime, UnreachableWithinBudget) {
  MinTimeConfig config;
  config.t_init = 0.25;
  config.max_doublings = 0;
  config.grape.restarts = 1;
  EXPECT_THROW(find_min_time(make_chain_system(3, 1), build_swap_goal(3), config), UnreachableGate);
}

TEST(FindMinTime, RejectsBadTolerance) {
  MinTimeConfig config;
  config.t_rel_tol = 0.0;
  EXPECT_THROW(find_min_time(make_chain_system(2, 1), build_swap_goal(2), config), InvalidArgument);
  config.t_rel_tol = 0.02;
  config.t_init = -1.0;
  EXPECT_THROW(find_min_time(make_chain_system(2, 1), build_swap_goal(2), config), InvalidArgument);
}

}  // namespace
}  // namespace qsl
