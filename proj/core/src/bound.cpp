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

#include "qsl/bound.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "qsl/errors.hpp"
#include "qsl/parallel.hpp"

namespace qsl {
namespace {

void require_sizes(int n, int m) {
  if (n < 2 || m < 1 || m > n - 1) {
    std::ostringstream msg;
    msg << "feasible parametrization needs N >= 2 and 1 <= M <= N-1, got N=" << n << ", M=" << m;
    throw InvalidArgument(msg.str());
  }
}

void require_projector_controls(const ControlSystem& system) {
  const int n = system.dim;
  for (int j = 0; j < system.num_controls(); ++j) {
    CMatrix expected = CMatrix::Zero(n, n);
    expected(j, j) = 1.0;
    const CMatrix& h = system.controls[j];
    if (h.rows() != n || h.cols() != n || (h - expected).cwiseAbs().maxCoeff() > 1e-12) {
      throw InvalidArgument("maximize_bound: control " + std::to_string(j + 1) +
                            " is not the level projector P_" + std::to_string(j + 1));
    }
  }
}

struct Assembled {
  CMatrix v;
  HermitianEigen generator_eig;
};

Assembled assemble(const RVector& flat, int n, int m) {
  const int k = n - m;
  Assembled out;
  out.v = CMatrix::Zero(n, n);
  for (int j = 0; j < m; ++j) out.v(j, j) = std::polar(1.0, flat(j));
  const CMatrix a = hermitian_from_coordinates(flat.tail(k * k), k);
  out.generator_eig = eig_hermitian(a);
  // exp(i A) = exp(-i t A) at t = -1.
  out.v.bottomRightCorner(k, k) = expm_from_eigen(out.generator_eig, -1.0);
  return out;
}

}  // namespace

RVector FeasibleUnitaryParams::flatten() const {
  RVector flat(phases.size() + generator.size());
  flat << phases, generator;
  return flat;
}

FeasibleUnitaryParams FeasibleUnitaryParams::unflatten(const RVector& flat, int n, int m) {
  require_sizes(n, m);
  if (flat.size() != feasible_param_count(n, m)) {
    throw InvalidArgument("FeasibleUnitaryParams: expected " +
                          std::to_string(feasible_param_count(n, m)) + " values, got " +
                          std::to_string(flat.size()));
  }
  const int k = n - m;
  return {flat.head(m), flat.tail(k * k)};
}

int feasible_param_count(int n, int m) { return m + (n - m) * (n - m); }

CMatrix hermitian_from_coordinates(const RVector& coords, int k) {
  if (coords.size() != static_cast<Eigen::Index>(k) * k) {
    throw InvalidArgument("hermitian_from_coordinates: expected " + std::to_string(k * k) +
                          " coordinates, got " + std::to_string(coords.size()));
  }
  CMatrix a(k, k);
  Eigen::Index idx = 0;
  for (int i = 0; i < k; ++i) a(i, i) = coords(idx++);
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      const Complex z(coords(idx), coords(idx + 1));
      idx += 2;
      a(i, j) = z;
      a(j, i) = std::conj(z);
    }
  }
  return a;
}

RVector coordinates_from_hermitian(const CMatrix& a) {
  const Eigen::Index k = a.rows();
  RVector coords(k * k);
  Eigen::Index idx = 0;
  for (Eigen::Index i = 0; i < k; ++i) coords(idx++) = a(i, i).real();
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = i + 1; j < k; ++j) {
      coords(idx++) = a(i, j).real();
      coords(idx++) = a(i, j).imag();
    }
  }
  return coords;
}

CMatrix feasible_unitary(const FeasibleUnitaryParams& params, int n, int m) {
  require_sizes(n, m);
  const int k = n - m;
  if (params.phases.size() != m || params.generator.size() != k * k) {
    std::ostringstream msg;
    msg << "feasible_unitary: expected " << m << " phases and " << k * k
        << " generator coordinates, got " << params.phases.size() << " and "
        << params.generator.size();
    throw InvalidArgument(msg.str());
  }
  return assemble(params.flatten(), n, m).v;
}

FeasibleUnitaryParams anchor_params(int n, int m) {
  require_sizes(n, m);
  const int k = n - m;
  FeasibleUnitaryParams p{RVector::Zero(m), RVector::Zero(k * k)};
  p.phases(0) = std::numbers::pi;
  return p;
}

std::optional<double> objective(const CMatrix& v, const CMatrix& goal, const CMatrix& drift,
                                double denom_floor) {
  const double denom = hs_norm(commutator(drift, v));
  const double numer = hs_norm(commutator(goal, v));
  if (!(denom >= denom_floor)) return std::nullopt;
  return numer / denom;
}

double analytic_reference(int n) {
  if (n < 2) throw InvalidArgument("analytic_reference: N must be >= 2");
  return std::sqrt(2.0 * (n - 1));
}

double previous_bound_reference() { return 2.0; }

BoundObjective::BoundObjective(CMatrix goal, const ControlSystem& system, double denom_floor)
    : goal_(std::move(goal)),
      drift_(system.drift),
      n_(system.dim),
      m_(system.num_controls()),
      denom_floor_(denom_floor) {
  require_sizes(n_, m_);
  if (goal_.rows() != n_ || goal_.cols() != n_ || drift_.rows() != n_ || drift_.cols() != n_) {
    throw InvalidArgument("BoundObjective: goal and drift must be " + std::to_string(n_) + "x" +
                          std::to_string(n_));
  }
}

std::optional<double> BoundObjective::value(const RVector& flat) const {
  if (flat.size() != param_count()) throw InvalidArgument("BoundObjective: wrong parameter count");
  return objective(assemble(flat, n_, m_).v, goal_, drift_, denom_floor_);
}

std::optional<double> BoundObjective::value_and_gradient(const RVector& flat, RVector& grad) const {
  if (flat.size() != param_count()) throw InvalidArgument("BoundObjective: wrong parameter count");
  grad.setZero(flat.size());
  const Assembled a = assemble(flat, n_, m_);
  const CMatrix& v = a.v;
  const CMatrix c = commutator(goal_, v);
  const CMatrix d = commutator(drift_, v);
  const double numer = hs_norm(c);
  const double denom = hs_norm(d);
  if (!(denom >= denom_floor_)) return std::nullopt;
  const double ratio = numer / denom;

  // Matrix gradient w.r.t. V in the Re tr(grad^dagger dV) pairing.
  CMatrix grad_v = -(ratio / (denom * denom)) * commutator(drift_, d);
  if (numer > 0.0) grad_v += commutator(goal_.adjoint(), c) / (numer * denom);

  const Complex i_unit(0.0, 1.0);
  for (int j = 0; j < m_; ++j) {
    grad(j) = std::real(std::conj(grad_v(j, j)) * i_unit * v(j, j));
  }
  const int k = n_ - m_;
  const CMatrix grad_a = expm_pullback(a.generator_eig, -1.0, grad_v.bottomRightCorner(k, k));
  Eigen::Index idx = m_;
  for (int i = 0; i < k; ++i) grad(idx++) = grad_a(i, i).real();
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      grad(idx++) = grad_a(i, j).real() + grad_a(j, i).real();
      grad(idx++) = grad_a(i, j).imag() - grad_a(j, i).imag();
    }
  }
  return ratio;
}

BoundResult maximize_bound(const CMatrix& goal, const ControlSystem& system,
                           const BoundConfig& config) {
  require_projector_controls(system);
  if (config.restarts < 1) throw InvalidArgument("maximize_bound: restarts must be >= 1");
  // The search runs on the unit-norm drift rounded to a 2^-40 grid, so every positive
  // rescaling of one drift follows the same trajectory.
  const double drift_scale = hs_norm(system.drift);
  if (!(drift_scale > 0.0) || !std::isfinite(drift_scale)) {
    throw InvalidArgument("maximize_bound: drift must be nonzero and finite");
  }
  ControlSystem canonical = system;
  canonical.drift = system.drift.unaryExpr([drift_scale](const Complex& z) {
    auto snap = [](double x) { return std::ldexp(std::nearbyint(std::ldexp(x, 40)), -40); };
    return Complex(snap(z.real() / drift_scale), snap(z.imag() / drift_scale));
  });
  const BoundObjective bound(goal, canonical, config.denom_floor);
  const int n = bound.dim();
  const int m = bound.num_controls();

  // Maximize the ratio by minimizing its negation.
  const ObjectiveFn negated = [&bound](const RVector& x, RVector& grad) {
    const auto value = bound.value_and_gradient(x, grad);
    if (!value) return kRejectedPenalty;
    grad = -grad;
    return -*value;
  };

  QuasiNewtonOptions options;
  options.max_iters = config.max_iters;
  options.grad_tol = config.grad_tol;
  options.relative_gradient = true;
  options.step_tol = config.step_tol;

  struct StartOutcome {
    double value = -std::numeric_limits<double>::infinity();
    RVector x;
    long evaluations = 0;
  };
  std::vector<StartOutcome> outcomes(config.restarts);

  parallel_for(config.restarts, config.jobs, [&](int start) {
    RVector x0;
    if (start == 0) {
      x0 = anchor_params(n, m).flatten();
    } else {
      auto rng = make_stream_rng(config.seed, static_cast<std::uint64_t>(start));
      std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
      std::normal_distribution<double> gauss(0.0, 1.0);
      x0.resize(bound.param_count());
      for (int j = 0; j < m; ++j) x0(j) = phase(rng);
      for (Eigen::Index j = m; j < x0.size(); ++j) x0(j) = gauss(rng);
    }
    StartOutcome& out = outcomes[start];
    auto consider = [&out](double f, const RVector& x) {
      if (f < kRejectedPenalty && -f > out.value) {
        out.value = -f;
        out.x = x;
      }
    };
    RVector g0(x0.size());
    consider(negated(x0, g0), x0);
    out.evaluations += 1;

    QuasiNewtonOptions local = options;
    local.method = QuasiNewtonMethod::kBfgs;
    const auto bfgs = minimize(negated, x0, local);
    out.evaluations += bfgs.evaluations;
    consider(bfgs.f, bfgs.x);
    if (config.both_algorithms) {
      local.method = QuasiNewtonMethod::kLbfgs;
      const auto lbfgs = minimize(negated, x0, local);
      out.evaluations += lbfgs.evaluations;
      consider(lbfgs.f, lbfgs.x);
    }
  });

  BoundResult result;
  result.starts_used = config.restarts;
  result.value = -std::numeric_limits<double>::infinity();
  for (int start = 0; start < config.restarts; ++start) {
    const auto& out = outcomes[start];
    result.per_start_values.push_back(out.value / drift_scale);
    result.objective_evaluations += out.evaluations;
    if (out.value > result.value) {
      result.value = out.value;
      result.best_start = start;
      result.argmax_params = out.x;
    }
  }
  if (!std::isfinite(result.value)) {
    throw NumericalError("maximize_bound: degenerate objective, every start was rejected by the "
                         "denominator floor");
  }
  result.argmax = assemble(result.argmax_params, n, m).v;
  // Re-evaluate at the reported argmax with the caller's drift.
  const auto exact =
      objective(result.argmax, goal, system.drift, config.denom_floor * drift_scale);
  result.value = exact ? *exact : result.value / drift_scale;
  return result;
}

}  // namespace qsl
