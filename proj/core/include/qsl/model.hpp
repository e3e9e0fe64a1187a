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

#include <vector>

#include "qsl/linalg.hpp"

namespace qsl {

/// Bilinear control system H(t) = drift + sum_k f_k(t) controls[k].
///
/// Level |j> of the N-level chain (j = 1..N) is stored at index j - 1.
struct ControlSystem {
  int dim = 0;
  CMatrix drift;
  std::vector<CMatrix> controls;
  /// Positive constant the raw drift was divided by (1 when not normalized).
  double normalization = 1.0;

  int num_controls() const { return static_cast<int>(controls.size()); }

  /// Copy with the drift multiplied by `factor` (> 0) and the normalization divided by it.
  ControlSystem with_scaled_drift(double factor) const;
};

struct Drift {
  CMatrix hamiltonian;   // h / ||h||_HS
  double normalization;  // ||h||_HS = sqrt(2 (N - 1))
};

/// Nearest-neighbour hopping chain h = sum_j |j><j+1| + |j+1><j|, normalized to unit HS norm.
Drift build_drift(int n);

/// Level projectors P_1..P_m (P_j = |j><j|). Requires 1 <= m <= n - 1.
std::vector<CMatrix> build_controls(int n, int m);

/// exp(-i pi/2 (|1><N| + |N><1|)): identity on levels 2..N-1, |1> -> -i|N>, |N> -> -i|1>.
CMatrix build_swap_goal(int n);

/// Normalized chain drift with projector controls on the first m levels.
ControlSystem make_chain_system(int n, int m);

struct LieRankResult {
  int rank = 0;                // real dimension of the generated Lie algebra
  bool full_unitary = false;   // rank == N^2, the algebra is u(N)
  bool special_unitary = false;  // rank == N^2 - 1 with traceless generators, su(N)
  bool controllable = false;   // full_unitary || special_unitary
};

/// Dimension of the real Lie algebra generated by i*drift and i*controls, computed by
/// commutator closure with Gram-Schmidt against the accumulated basis.
LieRankResult lie_rank(const ControlSystem& system, double independence_tol = 1e-9);

}  // namespace qsl
