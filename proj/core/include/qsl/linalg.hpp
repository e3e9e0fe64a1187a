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

#include <complex>

#include <Eigen/Dense>

namespace qsl {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

/// Dense Hermitian eigendecomposition h = W diag(values) W^dagger, values ascending.
struct HermitianEigen {
  RVector values;
  CMatrix vectors;
};

/// Real symmetric eigendecomposition h = W diag(values) W^T, values ascending.
struct SymmetricEigen {
  RVector values;
  Eigen::MatrixXd vectors;
};

/// Returns ab - ba. Throws InvalidArgument on dimension mismatch or non-square input.
CMatrix commutator(const CMatrix& a, const CMatrix& b);

/// Hilbert-Schmidt (Frobenius) norm sqrt(tr(a^dagger a)).
double hs_norm(const CMatrix& a);

/// Relative Hermiticity check: max |a_ij - conj(a_ji)| <= tol * max(1, ||a||).
bool is_hermitian(const CMatrix& a, double tol = 1e-12);

/// ||u^dagger u - 1||_HS <= tol * sqrt(dim).
bool is_unitary(const CMatrix& u, double tol = 1e-10);

/// Symmetrizes (a + a^dagger)/2 and diagonalizes it. The input must be Hermitian
/// within the relative tolerance used by is_hermitian.
HermitianEigen eig_hermitian(const CMatrix& h);

/// Diagonalizes (h + h^T)/2. Tridiagonal input skips the Householder reduction.
/// Throws NumericalError if the solver does not converge.
SymmetricEigen eig_symmetric(const Eigen::MatrixXd& h);

/// exp(-i t h) for Hermitian h, evaluated through its eigendecomposition.
CMatrix expm_hermitian(const CMatrix& h, double t);

/// Same as expm_hermitian, reusing an existing decomposition of h.
CMatrix expm_from_eigen(const HermitianEigen& eig, double t);

/// Kernel of the Frechet derivative of H -> exp(-i t H) in the eigenbasis of H:
///   phi_jk = (e^{-i t l_j} - e^{-i t l_k}) / (l_j - l_k),  phi_jj = -i t e^{-i t l_j}.
/// The divided difference is evaluated in the sinc form, so it stays accurate for
/// (nearly) degenerate eigenvalue pairs.
CMatrix expm_frechet_kernel(const RVector& eigenvalues, double t);

/// Same kernel with precomputed phases(j) = e^{-i t l_j}.
CMatrix expm_frechet_kernel(const RVector& eigenvalues, const Eigen::VectorXcd& phases, double t);

/// Pulls a matrix gradient back through U = exp(-i t H).
///
/// For a real function f with df = Re tr(grad_u^dagger dU), returns grad_h such that
/// df = Re tr(grad_h^dagger dH) for every perturbation dH of H.
CMatrix expm_pullback(const HermitianEigen& eig, double t, const CMatrix& grad_u);

/// Identity of the given dimension.
CMatrix identity(Eigen::Index dim);

}  // namespace qsl
