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

#include "qsl/cli/selftest.hpp"

#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "qsl/bound.hpp"
#include "qsl/cli/format.hpp"
#include "qsl/grape.hpp"
#include "qsl/model.hpp"
#include "qsl/parallel.hpp"

namespace qsl::cli {
namespace {

ControlSystem perturbed_system(int n, int m, double perturbation) {
  ControlSystem sys = make_chain_system(n, m);
  sys.drift(0, 1) += perturbation;
  sys.drift(1, 0) += perturbation;
  return sys;
}

CMatrix random_hermitian(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CMatrix a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a(i, j) = {g(rng), g(rng)};
  }
  return 0.5 * (a + a.adjoint());
}

// Largest relative mismatch between an analytic gradient and central differences,
// with an absolute floor on the scale.
double gradient_mismatch(const std::function<double(const RVector&)>& f, const RVector& x,
                         const RVector& analytic, double floor) {
  const double step = 1e-6;
  RVector probe = x;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe(i) = x(i) + step;
    const double up = f(probe);
    probe(i) = x(i) - step;
    const double down = f(probe);
    probe(i) = x(i);
    const double fd = (up - down) / (2 * step);
    worst = std::max(worst, std::abs(analytic(i) - fd) / std::max(std::abs(fd), floor));
  }
  return worst;
}

}  // namespace

std::vector<SelftestCheck> run_selftest(const SelftestOptions& options) {
  std::vector<SelftestCheck> checks;
  auto record = [&](std::string name, bool passed, std::string detail) {
    checks.push_back({std::move(name), passed, std::move(detail)});
  };
  auto rng = make_stream_rng(options.seed, 0x5e1f);
  std::normal_distribution<double> gauss;
  const double eps = options.drift_perturbation;

  {
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
      const CMatrix h = random_hermitian(6, rng);
      const CMatrix u = expm_hermitian(h, 0.5 + trial);
      worst = std::max(worst, hs_norm(u.adjoint() * u - identity(6)) / std::sqrt(6.0));
    }
    record("expm_unitarity", worst <= 1e-10, "max ||U'U - 1||/sqrt(d) = " + format_number(worst));
  }

  {
    const ControlSystem sys = perturbed_system(5, 2, eps);
    PulseSchedule s = PulseSchedule::zeros(50.0, 1000, 2);
    for (int k = 0; k < 2; ++k) {
      for (int j = 0; j < 1000; ++j) s.amplitudes(k, j) = 3.0 * gauss(rng);
    }
    const bool ok = is_unitary(propagate(sys, s), 1e-9);
    record("propagate_unitarity", ok, "1000 slots, N=5, M=2");
  }

  {
    bool ok = true;
    std::ostringstream detail;
    for (int n = 2; n <= 15; ++n) {
      const ControlSystem sys = perturbed_system(n, 1, eps);
      const bool norm_ok = std::abs(hs_norm(sys.drift) - 1.0) <= 1e-12;
      CMatrix reflection = identity(n);
      reflection(0, 0) = -1.0;
      const auto value = objective(reflection, build_swap_goal(n), sys.drift);
      const bool anchor_ok = value && std::abs(*value - analytic_reference(n)) <= 1e-10;
      if (!(norm_ok && anchor_ok) && ok) {
        detail << "first failure at N=" << n << " (objective "
               << (value ? format_number(*value) : std::string("rejected")) << ", expected "
               << format_number(analytic_reference(n)) << ")";
      }
      ok = ok && norm_ok && anchor_ok;
    }
    record("drift_normalization_and_anchor", ok, ok ? "N = 2..15" : detail.str());
  }

  {
    bool ok = true;
    for (int n = 2; n <= 15; ++n) {
      const CMatrix g = build_swap_goal(n);
      ok = ok && is_unitary(g) && hs_norm(g * g * g * g - identity(n)) <= 1e-10;
    }
    record("swap_goal_unitary_order_four", ok, "N = 2..15");
  }

  {
    const ControlSystem sys = perturbed_system(5, 2, eps);
    const BoundObjective bound(build_swap_goal(5), sys);
    double worst = 0.0;
    for (int point = 0; point < 10; ++point) {
      RVector x(bound.param_count());
      for (auto& v : x) v = gauss(rng);
      RVector grad;
      if (!bound.value_and_gradient(x, grad)) continue;
      worst = std::max(worst, gradient_mismatch([&](const RVector& p) { return *bound.value(p); },
                                                x, grad, 1e-4));
    }
    record("bound_gradient_vs_finite_differences", worst <= 1e-4,
           "max relative mismatch " + format_number(worst));
  }

  {
    const ControlSystem sys = perturbed_system(4, 1, eps);
    const CMatrix g = build_swap_goal(4);
    double worst = 0.0;
    for (int point = 0; point < 10; ++point) {
      PulseSchedule s = PulseSchedule::zeros(2.0 + point, 10, 1);
      for (int j = 0; j < 10; ++j) s.amplitudes(0, j) = gauss(rng);
      const Eigen::MatrixXd grad = grape_gradient(sys, g, s);
      const RVector x = Eigen::Map<const RVector>(s.amplitudes.data(), 10);
      const RVector analytic = Eigen::Map<const RVector>(grad.data(), 10);
      auto cost = [&](const RVector& p) {
        PulseSchedule t{s.total_time, 10, Eigen::Map<const Eigen::MatrixXd>(p.data(), 1, 10)};
        return grape_cost(sys, g, t, nullptr);
      };
      worst = std::max(worst, gradient_mismatch(cost, x, analytic, 1e-4));
    }
    record("grape_gradient_vs_finite_differences", worst <= 1e-4,
           "max relative mismatch " + format_number(worst));
  }

  {
    const ControlSystem sys = perturbed_system(6, 2, eps);
    const CMatrix g = build_swap_goal(6);
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
      RVector x(feasible_param_count(6, 2));
      for (auto& v : x) v = gauss(rng);
      const CMatrix v = feasible_unitary(FeasibleUnitaryParams::unflatten(x, 6, 2), 6, 2);
      const double phi = 2.0 * gauss(rng);
      worst = std::max(worst, std::abs(*objective(std::polar(1.0, phi) * v, g, sys.drift) -
                                       *objective(v, g, sys.drift)));
    }
    record("objective_phase_invariance", worst <= 1e-12, "max deviation " + format_number(worst));
  }

  {
    const ControlSystem sys = perturbed_system(4, 1, eps);
    const CMatrix g = build_swap_goal(4);
    BoundConfig config;
    config.restarts = 4;
    config.seed = options.seed;
    const BoundResult base = maximize_bound(g, sys, config);
    double worst = 0.0;
    for (double c : {0.5, 2.0, 10.0}) {
      const BoundResult scaled = maximize_bound(g, sys.with_scaled_drift(c), config);
      worst = std::max(worst, std::abs(scaled.value - base.value / c));
    }
    record("normalization_covariance", worst <= 1e-9, "max deviation " + format_number(worst));
    const bool anchored = base.value >= analytic_reference(4) - 1e-9;
    record("bound_dominates_anchor", anchored,
           "N=4 M=1: " + format_number(base.value) + " vs " + format_number(analytic_reference(4)));
  }

  return checks;
}

bool report_selftest(const std::vector<SelftestCheck>& checks, std::ostream& out) {
  bool all = true;
  for (const auto& c : checks) {
    out << (c.passed ? "[PASS] " : "[FAIL] ") << c.name << ": " << c.detail << '\n';
    all = all && c.passed;
  }
  out << (all ? "selftest passed" : "selftest FAILED") << " (" << checks.size() << " checks)\n";
  return all;
}

}  // namespace qsl::cli
