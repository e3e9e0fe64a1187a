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
#include <vector>

#include "qsl/linalg.hpp"
#include "qsl/model.hpp"
#include "qsl/quasi_newton.hpp"

namespace qsl {

/// Coordinates on the common stabilizer of the projector controls P_1..P_M:
///   V = diag(e^{i phases}) (+) exp(i A),  A Hermitian of size K = N - M.
///
/// `generator` holds the K^2 real coordinates of A: the K diagonal entries first,
/// then (Re, Im) of each strictly-upper entry in row-major order.
struct FeasibleUnitaryParams {
  RVector phases;
  RVector generator;

  /// Flat layout used by the optimizer: phases followed by generator.
  RVector flatten() const;
  static FeasibleUnitaryParams unflatten(const RVector& flat, int n, int m);
};

/// M + (N - M)^2.
int feasible_param_count(int n, int m);

/// Hermitian K x K matrix from its K^2 real coordinates, and back.
CMatrix hermitian_from_coordinates(const RVector& coords, int k);
RVector coordinates_from_hermitian(const CMatrix& a);

/// Block-diagonal unitary commuting with P_1..P_M. Throws InvalidArgument when the
/// parameter sizes do not match (N, M).
CMatrix feasible_unitary(const FeasibleUnitaryParams& params, int n, int m);

/// Parameters of the reflection 1 - 2 P_1 (phase pi on level 1, zero generator).
FeasibleUnitaryParams anchor_params(int n, int m);

inline constexpr double kDefaultDenomFloor = 1e-8;

/// ||[G, V]||_HS / ||[H0, V]||_HS, or nullopt when the denominator is below
/// `denom_floor` (V numerically stabilizes the drift).
std::optional<double> objective(const CMatrix& v, const CMatrix& goal, const CMatrix& drift,
                                double denom_floor = kDefaultDenomFloor);

/// sqrt(2 (N - 1)): the objective at V = 1 - 2 P_1 for the normalized chain.
double analytic_reference(int n);

/// Dimension-independent bound T >= 2 of the single-control result, for comparison.
double previous_bound_reference();

/// The bound objective as a function of the flat feasible parameters, with an
/// analytic gradient (chain rule through the eigendecomposition of the generator).
class BoundObjective {
 public:
  BoundObjective(CMatrix goal, const ControlSystem& system, double denom_floor = kDefaultDenomFloor);

  int dim() const { return n_; }
  int num_controls() const { return m_; }
  int param_count() const { return feasible_param_count(n_, m_); }

  std::optional<double> value(const RVector& flat) const;
  /// Objective value and its gradient in flat coordinates; nullopt (gradient zeroed)
  /// when rejected by the denominator floor.
  std::optional<double> value_and_gradient(const RVector& flat, RVector& grad) const;

 private:
  CMatrix goal_;
  CMatrix drift_;
  int n_;
  int m_;
  double denom_floor_;
};

struct BoundConfig {
  int restarts = 20;  // total starts, the first one is always the 1 - 2 P_1 anchor
  int max_iters = 500;
  double grad_tol = 1e-8;  // relative to the objective value
  double step_tol = 1e-14;
  double denom_floor = kDefaultDenomFloor;
  std::uint64_t seed = 0;
  /// Also run L-BFGS from every start and keep the better of the two.
  bool both_algorithms = false;
  int jobs = 1;
};

struct BoundResult {
  double value = 0.0;
  CMatrix argmax;
  RVector argmax_params;
  int best_start = 0;
  int starts_used = 0;
  long objective_evaluations = 0;
  /// Best objective per start (search precision); -infinity when a start ended rejected.
  std::vector<double> per_start_values;
};

/// Penalty returned to the minimizer for rejected candidates.
inline constexpr double kRejectedPenalty = 1e12;

/// Multi-start quasi-Newton maximization of the bound over the common stabilizer of
/// the projector controls. Deterministic for a fixed seed regardless of `jobs`.
/// Throws InvalidArgument if the controls are not P_1..P_M, NumericalError if every
/// start is rejected.
BoundResult maximize_bound(const CMatrix& goal, const ControlSystem& system,
                           const BoundConfig& config = {});

}  // namespace qsl
