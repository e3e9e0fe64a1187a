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

#include "qsl/quasi_newton.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <vector>

namespace qsl {

std::string_view to_string(QuasiNewtonStatus status) {
  switch (status) {
    case QuasiNewtonStatus::kGradientConverged: return "gradient_converged";
    case QuasiNewtonStatus::kStepConverged: return "step_converged";
    case QuasiNewtonStatus::kStalled: return "stalled";
    case QuasiNewtonStatus::kStoppedByCallback: return "stopped_by_callback";
    case QuasiNewtonStatus::kMaxIterations: return "max_iterations";
    case QuasiNewtonStatus::kLineSearchFailed: return "line_search_failed";
  }
  return "unknown";
}

namespace {

using Vec = Eigen::VectorXd;

struct Point {
  double alpha;
  double f;
  double slope;  // directional derivative g . p
};

// Minimizer of the cubic interpolating (a.f, a.slope) and (b.f, b.slope), kept inside
// the middle 80% of [a, b]; falls back to bisection when the cubic is not usable.
double interpolate(const Point& a, const Point& b) {
  const double lo = std::min(a.alpha, b.alpha);
  const double hi = std::max(a.alpha, b.alpha);
  const double width = hi - lo;
  double trial = 0.5 * (lo + hi);
  if (std::isfinite(a.f) && std::isfinite(b.f) && std::abs(a.f) < 1e11 && std::abs(b.f) < 1e11) {
    const double d1 = a.slope + b.slope - 3.0 * (a.f - b.f) / (a.alpha - b.alpha);
    const double disc = d1 * d1 - a.slope * b.slope;
    if (disc >= 0.0) {
      const double d2 = std::copysign(std::sqrt(disc), b.alpha - a.alpha);
      const double denom = b.slope - a.slope + 2.0 * d2;
      if (denom != 0.0) {
        const double c = b.alpha - (b.alpha - a.alpha) * (b.slope + d2 - d1) / denom;
        if (std::isfinite(c)) trial = c;
      }
    }
  }
  return std::clamp(trial, lo + 0.1 * width, hi - 0.1 * width);
}

class LineSearch {
 public:
  LineSearch(const ObjectiveFn& objective, const QuasiNewtonOptions& options, int& evaluations)
      : objective_(objective), options_(options), evaluations_(evaluations) {}

  // Strong Wolfe search along p from x. On success x_new/f_new/g_new hold the accepted point.
  bool search(const Vec& x, double f0, const Vec& g0, const Vec& p, double alpha_init, Vec& x_new,
              double& f_new, Vec& g_new) {
    const double slope0 = g0.dot(p);
    if (!(slope0 < 0.0)) return false;
    const Point start{0.0, f0, slope0};
    Point prev = start;
    double alpha = alpha_init;
    for (int i = 0; i < options_.max_line_search; ++i) {
      const Point cur = evaluate(x, p, alpha, x_new, f_new, g_new);
      if (cur.f > f0 + options_.wolfe_c1 * alpha * slope0 || (i > 0 && cur.f >= prev.f)) {
        return zoom(x, f0, slope0, p, prev, cur, x_new, f_new, g_new);
      }
      if (std::abs(cur.slope) <= -options_.wolfe_c2 * slope0) return true;
      if (cur.slope >= 0.0) return zoom(x, f0, slope0, p, cur, prev, x_new, f_new, g_new);
      prev = cur;
      alpha *= 2.0;
    }
    return false;
  }

 private:
  Point evaluate(const Vec& x, const Vec& p, double alpha, Vec& x_new, double& f_new, Vec& g_new) {
    x_new = x + alpha * p;
    g_new.resize(x.size());
    f_new = objective_(x_new, g_new);
    ++evaluations_;
    if (!std::isfinite(f_new)) f_new = std::numeric_limits<double>::max();
    return {alpha, f_new, g_new.dot(p)};
  }

  // Invariant: lo satisfies sufficient decrease and has the lowest f seen so far.
  bool zoom(const Vec& x, double f0, double slope0, const Vec& p, Point lo, Point hi, Vec& x_new,
            double& f_new, Vec& g_new) {
    Vec best_x;
    Vec best_g;
    double best_f = std::numeric_limits<double>::infinity();
    for (int i = 0; i < options_.max_line_search; ++i) {
      const double alpha = interpolate(lo, hi);
      if (std::abs(hi.alpha - lo.alpha) <= 1e-16 * std::max(1.0, std::abs(lo.alpha))) break;
      const Point cur = evaluate(x, p, alpha, x_new, f_new, g_new);
      if (cur.f > f0 + options_.wolfe_c1 * alpha * slope0 || cur.f >= lo.f) {
        hi = cur;
      } else {
        if (std::abs(cur.slope) <= -options_.wolfe_c2 * slope0) return true;
        if (cur.slope * (hi.alpha - lo.alpha) >= 0.0) hi = lo;
        lo = cur;
        if (cur.f < best_f) {
          best_f = cur.f;
          best_x = x_new;
          best_g = g_new;
        }
      }
    }
    // Curvature never satisfied; accept the best Armijo point if we have one.
    if (std::isfinite(best_f)) {
      x_new = best_x;
      f_new = best_f;
      g_new = best_g;
      return true;
    }
    if (lo.alpha > 0.0) {
      evaluate(x, p, lo.alpha, x_new, f_new, g_new);
      return true;
    }
    return false;
  }

  const ObjectiveFn& objective_;
  const QuasiNewtonOptions& options_;
  int& evaluations_;
};

// Two-loop recursion for the L-BFGS direction -H g.
Vec lbfgs_direction(const Vec& g, const std::deque<Vec>& s_hist, const std::deque<Vec>& y_hist,
                    const std::deque<double>& rho_hist) {
  Vec q = g;
  const std::size_t m = s_hist.size();
  std::vector<double> alpha(m);
  for (std::size_t i = m; i-- > 0;) {
    alpha[i] = rho_hist[i] * s_hist[i].dot(q);
    q -= alpha[i] * y_hist[i];
  }
  if (m > 0) q *= s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
  for (std::size_t i = 0; i < m; ++i) {
    const double beta = rho_hist[i] * y_hist[i].dot(q);
    q += (alpha[i] - beta) * s_hist[i];
  }
  return -q;
}

}  // namespace

QuasiNewtonResult minimize(const ObjectiveFn& objective, const Vec& x0,
                           const QuasiNewtonOptions& options) {
  QuasiNewtonResult result;
  const Eigen::Index n = x0.size();
  Vec x = x0;
  Vec g(n);
  double f = objective(x, g);
  result.evaluations = 1;

  auto finish = [&](QuasiNewtonStatus status) {
    result.x = x;
    result.f = f;
    result.grad_inf_norm = n > 0 ? g.cwiseAbs().maxCoeff() : 0.0;
    result.status = status;
    return result;
  };
  auto grad_converged = [&]() {
    const double scale = options.relative_gradient ? std::abs(f) : 1.0;
    return n == 0 || g.cwiseAbs().maxCoeff() <= options.grad_tol * scale;
  };

  if (options.stop && options.stop(f)) return finish(QuasiNewtonStatus::kStoppedByCallback);
  if (grad_converged()) return finish(QuasiNewtonStatus::kGradientConverged);

  LineSearch line_search(objective, options, result.evaluations);
  const bool use_bfgs = options.method == QuasiNewtonMethod::kBfgs;
  Eigen::MatrixXd inv_hessian;
  bool hessian_seeded = false;
  std::deque<Vec> s_hist;
  std::deque<Vec> y_hist;
  std::deque<double> rho_hist;
  std::deque<double> f_hist{f};

  Vec x_new(n);
  Vec g_new(n);
  double f_new = f;

  for (int iter = 0; iter < options.max_iters; ++iter) {
    Vec p;
    double alpha_init = 1.0;
    const bool first_step = use_bfgs ? !hessian_seeded : s_hist.empty();
    if (first_step) {
      p = -g;
      alpha_init = options.initial_step / g.norm();
    } else if (use_bfgs) {
      p = -(inv_hessian * g);
    } else {
      p = lbfgs_direction(g, s_hist, y_hist, rho_hist);
    }

    bool accepted = line_search.search(x, f, g, p, alpha_init, x_new, f_new, g_new);
    if (!accepted && !first_step) {
      // Quasi-Newton model went bad; drop it and retry along steepest descent.
      hessian_seeded = false;
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      p = -g;
      accepted = line_search.search(x, f, g, p, options.initial_step / g.norm(), x_new, f_new, g_new);
    }
    if (!accepted) return finish(QuasiNewtonStatus::kLineSearchFailed);

    const Vec s = x_new - x;
    const Vec y = g_new - g;
    const double step_inf = s.cwiseAbs().maxCoeff();
    const double x_inf = x.cwiseAbs().maxCoeff();
    x = x_new;
    f = f_new;
    g = g_new;
    result.iterations = iter + 1;

    if (options.stop && options.stop(f)) return finish(QuasiNewtonStatus::kStoppedByCallback);
    if (grad_converged()) return finish(QuasiNewtonStatus::kGradientConverged);
    if (step_inf <= options.step_tol * std::max(1.0, x_inf)) {
      return finish(QuasiNewtonStatus::kStepConverged);
    }
    if (options.stall_window > 0) {
      f_hist.push_back(f);
      if (static_cast<int>(f_hist.size()) > options.stall_window + 1) f_hist.pop_front();
      if (static_cast<int>(f_hist.size()) == options.stall_window + 1) {
        const double decrease = f_hist.front() - f;
        if (decrease <= options.stall_tol * std::abs(f)) return finish(QuasiNewtonStatus::kStalled);
      }
    }

    const double sy = s.dot(y);
    if (!(sy > 1e-12 * s.norm() * y.norm())) continue;  // curvature too weak; keep old model
    const double rho = 1.0 / sy;
    if (use_bfgs) {
      if (!hessian_seeded) {
        inv_hessian = Eigen::MatrixXd::Identity(n, n) * (sy / y.squaredNorm());
        hessian_seeded = true;
      }
      const Vec hy = inv_hessian * y;
      const double yhy = y.dot(hy);
      // H+ = (I - rho s y')H(I - rho y s') + rho s s', expanded.
      inv_hessian.noalias() -= rho * (hy * s.transpose() + s * hy.transpose());
      inv_hessian.noalias() += (rho * rho * yhy + rho) * (s * s.transpose());
    } else {
      s_hist.push_back(s);
      y_hist.push_back(y);
      rho_hist.push_back(rho);
      if (static_cast<int>(s_hist.size()) > options.lbfgs_history) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }
  }
  return finish(QuasiNewtonStatus::kMaxIterations);
}

}  // namespace qsl
