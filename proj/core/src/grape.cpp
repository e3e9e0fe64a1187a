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

#include "qsl/grape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <vector>

#include "qsl/errors.hpp"
#include "qsl/parallel.hpp"
#include "qsl/quasi_newton.hpp"

namespace qsl {
namespace {

void require_compatible(const ControlSystem& system, const CMatrix& goal) {
  if (goal.rows() != system.dim || goal.cols() != system.dim) {
    std::ostringstream msg;
    msg << "goal is " << goal.rows() << "x" << goal.cols() << " but the system has dimension "
        << system.dim;
    throw InvalidArgument(msg.str());
  }
}

CMatrix slot_hamiltonian(const ControlSystem& system, const PulseSchedule& schedule, int slot) {
  CMatrix h = system.drift;
  for (int k = 0; k < system.num_controls(); ++k) {
    const double f = schedule.amplitudes(k, slot);
    if (f != 0.0) h += f * system.controls[k];
  }
  return h;
}

// Drift and controls with zero imaginary part. Every slot Hamiltonian is then real
// symmetric, so the sweeps run in its real eigenbasis and complex matrices are kept
// as (re, im) pairs of real matrices.
struct RealModel {
  Eigen::MatrixXd drift;
  std::vector<Eigen::MatrixXd> controls;
  std::vector<Eigen::VectorXd> diagonals;  // non-empty when every control is diagonal
};

std::optional<RealModel> real_model(const ControlSystem& system) {
  if (!system.drift.imag().isZero(0.0)) return std::nullopt;
  RealModel model;
  model.drift = system.drift.real();
  bool diagonal = true;
  for (const auto& c : system.controls) {
    if (!c.imag().isZero(0.0)) return std::nullopt;
    model.controls.push_back(c.real());
    const Eigen::MatrixXd& r = model.controls.back();
    diagonal = diagonal && (r - Eigen::MatrixXd(r.diagonal().asDiagonal())).isZero(0.0);
  }
  if (diagonal) {
    for (const auto& c : model.controls) model.diagonals.push_back(c.diagonal());
  }
  return model;
}

double real_grape_cost(const RealModel& model, const CMatrix& goal, const PulseSchedule& schedule,
                       Eigen::MatrixXd* grad) {
  using Eigen::MatrixXd;
  const Eigen::Index n = model.drift.rows();
  const int m = static_cast<int>(model.controls.size());
  const int slots = schedule.n_slots;
  const double dt = schedule.slot_duration();
  const bool diagonal = !model.diagonals.empty() || m == 0;

  std::vector<SymmetricEigen> eigs;
  if (grad) eigs.reserve(slots);
  MatrixXd ur = MatrixXd::Identity(n, n);
  MatrixXd ui = MatrixXd::Zero(n, n);
  MatrixXd tr(n, n);
  MatrixXd ti(n, n);
  MatrixXd h(n, n);
  RVector cosines(n);
  RVector sines(n);
  for (int s = 0; s < slots; ++s) {
    h = model.drift;
    for (int k = 0; k < m; ++k) {
      const double f = schedule.amplitudes(k, s);
      if (f == 0.0) continue;
      if (diagonal) {
        h.diagonal() += f * model.diagonals[k];
      } else {
        h += f * model.controls[k];
      }
    }
    SymmetricEigen eig = eig_symmetric(h);
    // U <- W diag(e^{-i dt l}) W^T U
    tr.noalias() = eig.vectors.transpose() * ur;
    ti.noalias() = eig.vectors.transpose() * ui;
    for (Eigen::Index a = 0; a < n; ++a) {
      cosines(a) = std::cos(dt * eig.values(a));
      sines(a) = -std::sin(dt * eig.values(a));
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index a = 0; a < n; ++a) {
        const double re = tr(a, j);
        const double im = ti(a, j);
        tr(a, j) = cosines(a) * re - sines(a) * im;
        ti(a, j) = cosines(a) * im + sines(a) * re;
      }
    }
    ur.noalias() = eig.vectors * tr;
    ui.noalias() = eig.vectors * ti;
    if (grad) eigs.push_back(std::move(eig));
  }
  const MatrixXd rr = ur - goal.real();
  const MatrixXd ri = ui - goal.imag();
  const double cost = (rr.squaredNorm() + ri.squaredNorm()) / (2.0 * static_cast<double>(n));
  if (!grad) return cost;

  grad->setZero(m, slots);
  // E = back * (X_s ... X_1)^dagger, starting from (U - G) U^dagger / n. Moving one
  // slot down conjugates it by that slot's propagator.
  MatrixXd er = (rr * ur.transpose() + ri * ui.transpose()) / static_cast<double>(n);
  MatrixXd ei = (ri * ur.transpose() - rr * ui.transpose()) / static_cast<double>(n);
  MatrixXd qr(n, n);
  MatrixXd qi(n, n);
  MatrixXd re_y(n, n);
  Eigen::VectorXcd phases(n);
  for (int s = slots - 1; s >= 0; --s) {
    const MatrixXd& w = eigs[s].vectors;
    const RVector& l = eigs[s].values;
    tr.noalias() = w.transpose() * er;
    qr.noalias() = tr * w;
    ti.noalias() = w.transpose() * ei;
    qi.noalias() = ti * w;

    // The gradient through exp(-i dt H) in the eigenbasis is (Q D) o conj(phi), and
    // the next E is W (conj(D) Q D) W^T.
    for (Eigen::Index a = 0; a < n; ++a) phases(a) = std::polar(1.0, -dt * l(a));
    const CMatrix phi = expm_frechet_kernel(l, phases, dt);
    for (Eigen::Index b = 0; b < n; ++b) {
      for (Eigen::Index a = 0; a < n; ++a) {
        const Complex qp = Complex(qr(a, b), qi(a, b)) * phases(b);
        re_y(a, b) = (qp * std::conj(phi(a, b))).real();
        const Complex z = qp * std::conj(phases(a));
        qr(a, b) = z.real();
        qi(a, b) = z.imag();
      }
    }
    tr.noalias() = w * re_y;
    if (diagonal) {
      const RVector grad_diag = tr.cwiseProduct(w).rowwise().sum();
      for (int k = 0; k < m; ++k) (*grad)(k, s) = model.diagonals[k].dot(grad_diag);
    } else {
      const MatrixXd grad_h = tr * w.transpose();
      for (int k = 0; k < m; ++k) (*grad)(k, s) = grad_h.cwiseProduct(model.controls[k]).sum();
    }

    if (s == 0) break;
    tr.noalias() = w * qr;
    er.noalias() = tr * w.transpose();
    ti.noalias() = w * qi;
    ei.noalias() = ti * w.transpose();
  }
  return cost;
}

}  // namespace

PulseSchedule PulseSchedule::zeros(double total_time, int n_slots, int num_controls) {
  return {total_time, n_slots, Eigen::MatrixXd::Zero(num_controls, std::max(n_slots, 0))};
}

void PulseSchedule::validate(int num_controls) const {
  if (!(total_time > 0.0) || !std::isfinite(total_time)) {
    throw InvalidArgument("PulseSchedule: total time must be positive and finite");
  }
  if (n_slots < 1) throw InvalidArgument("PulseSchedule: need at least one slot");
  if (amplitudes.rows() != num_controls || amplitudes.cols() != n_slots) {
    std::ostringstream msg;
    msg << "PulseSchedule: amplitudes are " << amplitudes.rows() << "x" << amplitudes.cols()
        << ", expected " << num_controls << "x" << n_slots;
    throw InvalidArgument(msg.str());
  }
  if (!amplitudes.allFinite()) throw InvalidArgument("PulseSchedule: non-finite amplitude");
}

int default_slot_count(double total_time) {
  return std::max(40, static_cast<int>(std::ceil(10.0 * total_time)));
}

CMatrix propagate(const ControlSystem& system, const PulseSchedule& schedule) {
  schedule.validate(system.num_controls());
  const double dt = schedule.slot_duration();
  CMatrix u = identity(system.dim);
  for (int s = 0; s < schedule.n_slots; ++s) {
    u = expm_hermitian(slot_hamiltonian(system, schedule, s), dt) * u;
  }
  return u;
}

double gate_error(const CMatrix& goal, const CMatrix& u) {
  if (goal.rows() != u.rows() || goal.cols() != u.cols() || goal.rows() != goal.cols()) {
    throw InvalidArgument("gate_error: dimension mismatch");
  }
  return hs_norm(goal - u) / std::sqrt(2.0 * static_cast<double>(goal.rows()));
}

double grape_cost(const ControlSystem& system, const CMatrix& goal, const PulseSchedule& schedule,
                  Eigen::MatrixXd* grad) {
  require_compatible(system, goal);
  schedule.validate(system.num_controls());
  if (const auto model = real_model(system)) return real_grape_cost(*model, goal, schedule, grad);
  const int n = system.dim;
  const int slots = schedule.n_slots;
  const double dt = schedule.slot_duration();

  std::vector<HermitianEigen> eigs;
  std::vector<CMatrix> steps;
  std::vector<CMatrix> forward;  // forward[s] = X_s ... X_1, forward[0] = 1
  if (grad) {
    eigs.reserve(slots);
    steps.reserve(slots);
    forward.reserve(slots + 1);
  }
  CMatrix u = identity(n);
  if (grad) forward.push_back(u);
  for (int s = 0; s < slots; ++s) {
    HermitianEigen eig = eig_hermitian(slot_hamiltonian(system, schedule, s));
    CMatrix x = expm_from_eigen(eig, dt);
    u = x * u;
    if (grad) {
      eigs.push_back(std::move(eig));
      steps.push_back(std::move(x));
      forward.push_back(u);
    }
  }
  const CMatrix residual = u - goal;
  const double cost = residual.squaredNorm() / (2.0 * n);
  if (!grad) return cost;

  grad->setZero(system.num_controls(), slots);
  // back = (X_n ... X_{s+1})^dagger dcost/dU, walked from the last slot down.
  CMatrix back = residual / static_cast<double>(n);
  for (int s = slots - 1; s >= 0; --s) {
    const CMatrix grad_step = back * forward[s].adjoint();
    const CMatrix grad_h = expm_pullback(eigs[s], dt, grad_step);
    for (int k = 0; k < system.num_controls(); ++k) {
      (*grad)(k, s) = grad_h.conjugate().cwiseProduct(system.controls[k]).sum().real();
    }
    back = steps[s].adjoint() * back;
  }
  return cost;
}

Eigen::MatrixXd grape_gradient(const ControlSystem& system, const CMatrix& goal,
                               const PulseSchedule& schedule) {
  Eigen::MatrixXd grad;
  grape_cost(system, goal, schedule, &grad);
  return grad;
}

GrapeResult grape_optimize(const ControlSystem& system, const CMatrix& goal, double total_time,
                           const GrapeConfig& config) {
  require_compatible(system, goal);
  if (!(total_time > 0.0) || !std::isfinite(total_time)) {
    throw InvalidArgument("grape_optimize: T must be positive and finite");
  }
  if (config.restarts < 1) throw InvalidArgument("grape_optimize: restarts must be >= 1");
  const int m = system.num_controls();
  const int slots = config.n_slots > 0 ? config.n_slots : default_slot_count(total_time);
  const double target_cost = config.target_error * config.target_error;

  QuasiNewtonOptions options;
  options.method = QuasiNewtonMethod::kLbfgs;
  options.max_iters = config.max_iters;
  options.grad_tol = config.grad_tol;
  options.stall_window = config.stall_window;
  options.stall_tol = config.stall_tol;
  options.lbfgs_history = 20;
  options.stop = [target_cost](double f) { return f <= target_cost; };

  auto run_restart = [&](int restart) {
    auto rng = make_stream_rng(config.seed, static_cast<std::uint64_t>(restart));
    std::normal_distribution<double> gauss(0.0, config.amp_init_scale);
    PulseSchedule schedule = PulseSchedule::zeros(total_time, slots, m);
    for (int s = 0; s < slots; ++s) {
      for (int k = 0; k < m; ++k) schedule.amplitudes(k, s) = gauss(rng);
    }
    const ObjectiveFn cost = [&](const RVector& x, RVector& g) {
      PulseSchedule trial{total_time, slots, Eigen::Map<const Eigen::MatrixXd>(x.data(), m, slots)};
      Eigen::MatrixXd grad;
      const double c = grape_cost(system, goal, trial, &grad);
      g = Eigen::Map<const RVector>(grad.data(), grad.size());
      return c;
    };
    const RVector x0 = Eigen::Map<const RVector>(schedule.amplitudes.data(), m * slots);
    const auto qn = minimize(cost, x0, options);
    GrapeResult r;
    r.schedule = {total_time, slots, Eigen::Map<const Eigen::MatrixXd>(qn.x.data(), m, slots)};
    r.final_error = gate_error(goal, propagate(system, r.schedule));
    r.iterations = qn.iterations;
    r.converged = r.final_error <= config.target_error;
    r.restart_index = restart;
    r.evaluations = qn.evaluations;
    return r;
  };

  std::vector<GrapeResult> results;
  results.reserve(config.restarts);
  const int wave = config.stop_on_success ? std::max(1, config.jobs) : config.restarts;
  for (int begin = 0; begin < config.restarts; begin += wave) {
    const int count = std::min(wave, config.restarts - begin);
    std::vector<GrapeResult> batch(count);
    parallel_for(count, config.jobs, [&](int i) { batch[i] = run_restart(begin + i); });
    bool any_success = false;
    for (auto& r : batch) {
      any_success = any_success || r.converged;
      results.push_back(std::move(r));
    }
    if (config.stop_on_success && any_success) break;
  }

  long evaluations = 0;
  const GrapeResult* best = nullptr;
  for (const auto& r : results) {
    evaluations += r.evaluations;
    if (!best) {
      best = &r;
    } else if (r.converged != best->converged) {
      if (r.converged) best = &r;
    } else if (!r.converged && r.final_error < best->final_error) {
      best = &r;
    }
  }
  GrapeResult out = *best;
  out.restarts_run = static_cast<int>(results.size());
  out.evaluations = evaluations;
  return out;
}

}  // namespace qsl
