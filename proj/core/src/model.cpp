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

#include "qsl/model.hpp"

#include <cmath>
#include <deque>
#include <string>

#include "qsl/errors.hpp"

namespace qsl {

ControlSystem ControlSystem::with_scaled_drift(double factor) const {
  if (!(factor > 0.0) || !std::isfinite(factor)) {
    throw InvalidArgument("with_scaled_drift: factor must be positive and finite");
  }
  ControlSystem out = *this;
  out.drift *= factor;
  out.normalization /= factor;
  return out;
}

Drift build_drift(int n) {
  if (n < 2) throw InvalidArgument("build_drift: N must be >= 2, got " + std::to_string(n));
  CMatrix h = CMatrix::Zero(n, n);
  for (int j = 0; j + 1 < n; ++j) {
    h(j, j + 1) = 1.0;
    h(j + 1, j) = 1.0;
  }
  const double norm = std::sqrt(2.0 * (n - 1));
  return {h / norm, norm};
}

std::vector<CMatrix> build_controls(int n, int m) {
  if (n < 2) throw InvalidArgument("build_controls: N must be >= 2, got " + std::to_string(n));
  if (m < 1 || m > n - 1) {
    throw InvalidArgument("build_controls: M must lie in [1, N-1] = [1, " + std::to_string(n - 1) +
                          "], got " + std::to_string(m));
  }
  std::vector<CMatrix> controls;
  controls.reserve(m);
  for (int j = 0; j < m; ++j) {
    CMatrix p = CMatrix::Zero(n, n);
    p(j, j) = 1.0;
    controls.push_back(std::move(p));
  }
  return controls;
}

CMatrix build_swap_goal(int n) {
  if (n < 2) throw InvalidArgument("build_swap_goal: N must be >= 2, got " + std::to_string(n));
  // On span{|1>,|N>} the generator is sigma_x, and exp(-i pi/2 sigma_x) = -i sigma_x.
  CMatrix g = identity(n);
  g(0, 0) = 0.0;
  g(n - 1, n - 1) = 0.0;
  g(0, n - 1) = Complex(0.0, -1.0);
  g(n - 1, 0) = Complex(0.0, -1.0);
  return g;
}

ControlSystem make_chain_system(int n, int m) {
  auto controls = build_controls(n, m);
  auto drift = build_drift(n);
  return {n, std::move(drift.hamiltonian), std::move(controls), drift.normalization};
}

namespace {

// Anti-Hermitian X as a real vector (Re X, Im X), so the real span is ordinary linear span.
Eigen::VectorXd to_real(const CMatrix& x) {
  const Eigen::Index n2 = x.size();
  Eigen::VectorXd v(2 * n2);
  for (Eigen::Index i = 0; i < n2; ++i) {
    v(i) = x.data()[i].real();
    v(n2 + i) = x.data()[i].imag();
  }
  return v;
}

// Two passes of modified Gram-Schmidt; returns the residual.
Eigen::VectorXd orthogonalize(Eigen::VectorXd v, const std::vector<Eigen::VectorXd>& basis) {
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& b : basis) v -= b.dot(v) * b;
  }
  return v;
}

}  // namespace

LieRankResult lie_rank(const ControlSystem& system, double independence_tol) {
  const int n = system.dim;
  const Eigen::Index max_rank = static_cast<Eigen::Index>(n) * n;
  const Complex i_unit(0.0, 1.0);

  std::vector<CMatrix> elements;  // unit-norm anti-Hermitian basis elements
  std::vector<Eigen::VectorXd> basis;
  std::deque<std::size_t> pending;

  auto try_add = [&](const CMatrix& x) {
    const double norm = hs_norm(x);
    if (norm == 0.0) return;
    const CMatrix unit = x / norm;
    Eigen::VectorXd residual = orthogonalize(to_real(unit), basis);
    const double r = residual.norm();
    if (r <= independence_tol) return;
    basis.push_back(residual / r);
    // Store the element matching the orthonormal vector so brackets stay well scaled.
    const Eigen::Index n2 = unit.size();
    CMatrix stored(unit.rows(), unit.cols());
    for (Eigen::Index k = 0; k < n2; ++k) {
      stored.data()[k] = Complex(basis.back()(k), basis.back()(n2 + k));
    }
    elements.push_back(std::move(stored));
    pending.push_back(elements.size() - 1);
  };

  bool traceless = std::abs(system.drift.trace()) < 1e-12;
  try_add(i_unit * system.drift);
  for (const auto& h : system.controls) {
    traceless = traceless && std::abs(h.trace()) < 1e-12;
    try_add(i_unit * h);
  }

  while (!pending.empty() && static_cast<Eigen::Index>(basis.size()) < max_rank) {
    const std::size_t idx = pending.front();
    pending.pop_front();
    for (std::size_t j = 0; j < idx && static_cast<Eigen::Index>(basis.size()) < max_rank; ++j) {
      try_add(commutator(elements[idx], elements[j]));
    }
  }

  LieRankResult result;
  result.rank = static_cast<int>(basis.size());
  result.full_unitary = result.rank == max_rank;
  result.special_unitary = traceless && result.rank == max_rank - 1;
  result.controllable = result.full_unitary || result.special_unitary;
  return result;
}

}  // namespace qsl
