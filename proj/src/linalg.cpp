// SPDX-License-Identifier: Apache-2.0
#include "emcris/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

namespace emcris {

SymSqrt sym_sqrt_pd(const RMat& a, double eps_rel) {
  Eigen::SelfAdjointEigenSolver<RMat> es(a);
  if (es.info() != Eigen::Success) throw ModelError("eigendecomposition failed");
  const RVec& ev = es.eigenvalues();
  const double floor = eps_rel * ev.maxCoeff();
  if (ev.minCoeff() <= floor) {
    throw ModelError("matrix is not positive definite: min eigenvalue " +
                     std::to_string(ev.minCoeff()));
  }
  const RVec root = ev.array().sqrt();
  SymSqrt out;
  out.sqrt = es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose();
  out.inv_sqrt =
      es.eigenvectors() * root.cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
  return out;
}

SymSqrt sym_sqrt_psd_clamped(const RMat& a, double eps_rel) {
  Eigen::SelfAdjointEigenSolver<RMat> es(a);
  if (es.info() != Eigen::Success) throw ModelError("eigendecomposition failed");
  const RVec& ev = es.eigenvalues();
  const double floor = eps_rel * ev.maxCoeff();
  if (!(floor > 0.0)) throw ModelError("matrix is not positive semi-definite");
  if (ev.minCoeff() < -floor) {
    throw ModelError("matrix is not positive semi-definite: min eigenvalue " +
                     std::to_string(ev.minCoeff()));
  }
  const RVec root = ev.cwiseMax(floor).cwiseSqrt();
  SymSqrt out;
  RMat s = es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose();
  RMat si =
      es.eigenvectors() * root.cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
  out.sqrt = 0.5 * (s + s.transpose());
  out.inv_sqrt = 0.5 * (si + si.transpose());
  return out;
}

CMat herm_sqrt_psd(const CMat& a, double tol_rel) {
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitize(a));
  if (es.info() != Eigen::Success) throw ModelError("eigendecomposition failed");
  RVec ev = es.eigenvalues();
  const double scale = std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
  if (ev.minCoeff() < -tol_rel * scale) {
    throw ModelError("matrix is not positive semi-definite: min eigenvalue " +
                     std::to_string(ev.minCoeff()));
  }
  ev = ev.cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

CMat hermitize(const CMat& a) { return 0.5 * (a + a.adjoint()); }

double min_eigenvalue_sym(const RMat& a) {
  Eigen::SelfAdjointEigenSolver<RMat> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double min_eigenvalue_herm(const CMat& a) {
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitize(a), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double rcond(const CMat& a) { return Eigen::PartialPivLU<CMat>(a).rcond(); }

}  // namespace emcris
