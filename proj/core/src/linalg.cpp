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

#include "qsl/linalg.hpp"

#include <cmath>
#include <sstream>

#include "qsl/errors.hpp"

namespace qsl {
namespace {

void require_square(const CMatrix& a, const char* what) {
  if (a.rows() != a.cols() || a.rows() < 1) {
    std::ostringstream msg;
    msg << what << ": expected a non-empty square matrix, got " << a.rows() << "x" << a.cols();
    throw InvalidArgument(msg.str());
  }
}

// sin(x)/x with the removable singularity filled in.
double sinc(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

}  // namespace

CMatrix identity(Eigen::Index dim) { return CMatrix::Identity(dim, dim); }

CMatrix commutator(const CMatrix& a, const CMatrix& b) {
  require_square(a, "commutator");
  require_square(b, "commutator");
  if (a.rows() != b.rows()) {
    std::ostringstream msg;
    msg << "commutator: dimension mismatch " << a.rows() << " vs " << b.rows();
    throw InvalidArgument(msg.str());
  }
  CMatrix out = a * b;
  out.noalias() -= b * a;
  return out;
}

double hs_norm(const CMatrix& a) { return a.norm(); }

bool is_hermitian(const CMatrix& a, double tol) {
  if (a.rows() != a.cols()) return false;
  const double scale = std::max(1.0, hs_norm(a));
  return (a - a.adjoint()).cwiseAbs().maxCoeff() <= tol * scale;
}

bool is_unitary(const CMatrix& u, double tol) {
  if (u.rows() != u.cols() || u.rows() < 1) return false;
  const double err = hs_norm(u.adjoint() * u - identity(u.rows()));
  return err <= tol * std::sqrt(static_cast<double>(u.rows()));
}

SymmetricEigen eig_symmetric(const Eigen::MatrixXd& h) {
  if (h.rows() != h.cols() || h.rows() < 1) {
    std::ostringstream msg;
    msg << "eig_symmetric: expected a non-empty square matrix, got " << h.rows() << "x" << h.cols();
    throw InvalidArgument(msg.str());
  }
  const Eigen::Index n = h.rows();
  bool tridiagonal = true;
  for (Eigen::Index j = 0; j < n && tridiagonal; ++j) {
    for (Eigen::Index i = j + 2; i < n; ++i) {
      if (h(i, j) != 0.0 || h(j, i) != 0.0) {
        tridiagonal = false;
        break;
      }
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  if (tridiagonal && n > 1) {
    Eigen::VectorXd sub(n - 1);
    for (Eigen::Index i = 0; i + 1 < n; ++i) sub(i) = 0.5 * (h(i + 1, i) + h(i, i + 1));
    solver.computeFromTridiagonal(h.diagonal(), sub);
  } else {
    solver.compute(0.5 * (h + h.transpose()));
  }
  if (solver.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "eig_symmetric: eigensolver failed to converge (dim " << n << ", ||h||_HS = " << h.norm()
        << ")";
    throw NumericalError(msg.str());
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

HermitianEigen eig_hermitian(const CMatrix& h) {
  require_square(h, "eig_hermitian");
  if (!is_hermitian(h)) {
    std::ostringstream msg;
    msg << "eig_hermitian: matrix of dimension " << h.rows()
        << " is not Hermitian (max asymmetry " << (h - h.adjoint()).cwiseAbs().maxCoeff() << ")";
    throw InvalidArgument(msg.str());
  }
  if (h.imag().isZero(0.0)) {
    // Real symmetric input, e.g. every slot Hamiltonian of the chain model.
    SymmetricEigen real = eig_symmetric(h.real());
    return {std::move(real.values), real.vectors.cast<Complex>()};
  }
  const CMatrix sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "eig_hermitian: eigensolver failed to converge (dim " << h.rows()
        << ", ||h||_HS = " << hs_norm(h) << ")";
    throw NumericalError(msg.str());
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

CMatrix expm_from_eigen(const HermitianEigen& eig, double t) {
  const Eigen::Index n = eig.values.size();
  Eigen::VectorXcd phases(n);
  for (Eigen::Index j = 0; j < n; ++j) phases(j) = std::polar(1.0, -t * eig.values(j));
  return eig.vectors * phases.asDiagonal() * eig.vectors.adjoint();
}

CMatrix expm_hermitian(const CMatrix& h, double t) {
  if (t == 0.0) {
    require_square(h, "expm_hermitian");
    return identity(h.rows());
  }
  return expm_from_eigen(eig_hermitian(h), t);
}

CMatrix expm_frechet_kernel(const RVector& eigenvalues, double t) {
  Eigen::VectorXcd phases(eigenvalues.size());
  for (Eigen::Index j = 0; j < eigenvalues.size(); ++j) {
    phases(j) = std::polar(1.0, -t * eigenvalues(j));
  }
  return expm_frechet_kernel(eigenvalues, phases, t);
}

CMatrix expm_frechet_kernel(const RVector& eigenvalues, const Eigen::VectorXcd& phases, double t) {
  const Eigen::Index n = eigenvalues.size();
  CMatrix phi(n, n);
  const Complex minus_i_t(0.0, -t);
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double gap = eigenvalues(j) - eigenvalues(k);
      const double half_gap = 0.5 * t * gap;
      if (std::abs(half_gap) > 1e-3) {
        phi(j, k) = (phases(j) - phases(k)) / gap;
      } else {
        const double mean = 0.5 * (eigenvalues(j) + eigenvalues(k));
        phi(j, k) = minus_i_t * std::polar(1.0, -t * mean) * sinc(half_gap);
      }
    }
  }
  return phi;
}

CMatrix expm_pullback(const HermitianEigen& eig, double t, const CMatrix& grad_u) {
  const CMatrix phi = expm_frechet_kernel(eig.values, t);
  const CMatrix rotated = eig.vectors.adjoint() * grad_u * eig.vectors;
  const CMatrix weighted = rotated.cwiseProduct(phi.conjugate());
  return eig.vectors * weighted * eig.vectors.adjoint();
}

}  // namespace qsl
