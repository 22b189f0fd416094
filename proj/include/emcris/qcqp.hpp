// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "emcris/types.hpp"

namespace emcris {

// Minimize x^H K1 x - 2 Re{k^H x} subject to x^H K2 x <= P, with K1, K2
// Hermitian positive definite.  Either the unconstrained minimizer K1^{-1} k
// is feasible (lambda = 0), or the solution is x(lambda) = (K1 + lambda K2)^{-1} k
// with lambda > 0 the unique root of g(lambda) = x^H K2 x - P, found by
// bisection on the strictly decreasing g.
//
// One generalized eigendecomposition up front makes every g evaluation O(n):
// with K2 = L L^H and L^{-1} K1 L^{-H} = U Xi U^H, k_hat = U^H L^{-1} k,
//   g(lambda) = sum_i |k_hat_i|^2 / (Xi_i + lambda)^2 - P.
template <typename Scalar>
struct QcqpResult {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> x;
  double lambda = 0.0;
  bool constraint_active = false;
  int bisect_iters = 0;
};

// Pre-factored form for repeated solves against a fixed (K1, K2) pair, as in
// the inner ADMM loops where only the linear term changes per iteration.
template <typename Scalar>
class PrefactoredQcqp {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

 public:
  PrefactoredQcqp(const Mat& k1, const Mat& k2) {
    Eigen::LLT<Mat> llt_k2(k2);
    if (llt_k2.info() != Eigen::Success) throw ModelError("K2 is not positive definite");
    const Mat l_inv = llt_k2.matrixL().solve(Mat::Identity(k1.rows(), k1.cols()));
    const Mat b = l_inv * k1 * l_inv.adjoint();
    Eigen::SelfAdjointEigenSolver<Mat> es(Mat(0.5 * (b + b.adjoint())));
    if (es.info() != Eigen::Success) throw ModelError("eigendecomposition failed");
    xi_ = es.eigenvalues();
    if (xi_.minCoeff() <= 0.0) throw ModelError("K1 is not positive definite");
    fwd_ = es.eigenvectors().adjoint() * l_inv;  // k_hat = fwd * k
    bwd_ = l_inv.adjoint() * es.eigenvectors();  // x = bwd * scaled
  }

  QcqpResult<Scalar> solve(const Vec& k, double p, double rel_tol = 1e-9) const {
    if (!(p > 0.0)) throw InfeasibleError("constraint budget must be positive");
    QcqpResult<Scalar> out;
    if (k.norm() == 0.0) {
      out.x = Vec::Zero(k.size());
      return out;
    }
    const Vec k_hat = fwd_ * k;
    const RVec k_hat2 = k_hat.cwiseAbs2();
    const auto g = [&](double lambda) {
      double v = 0.0;
      for (Eigen::Index i = 0; i < xi_.size(); ++i) {
        const double d = xi_(i) + lambda;
        v += k_hat2(i) / (d * d);
      }
      return v - p;
    };
    if (g(0.0) <= 0.0) {
      Vec scaled = k_hat;
      for (Eigen::Index i = 0; i < xi_.size(); ++i) scaled(i) /= xi_(i);
      out.x = bwd_ * scaled;
      return out;
    }
    out.constraint_active = true;
    double lo = 0.0, hi = std::max(1.0, xi_.cwiseAbs().maxCoeff());
    while (g(hi) > 0.0) {
      lo = hi;
      hi *= 2.0;
      if (hi > 1e300) throw ModelError("bisection bracket overflow");
    }
    const double tol = rel_tol * p;
    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < 400; ++it) {
      mid = 0.5 * (lo + hi);
      const double v = g(mid);
      ++out.bisect_iters;
      (v > 0.0 ? lo : hi) = mid;
      if (std::abs(v) <= tol && std::max(1.0, mid) * std::abs(v) <= tol) break;
    }
    out.lambda = mid;
    Vec scaled = k_hat;
    for (Eigen::Index i = 0; i < xi_.size(); ++i) scaled(i) /= (xi_(i) + mid);
    out.x = bwd_ * scaled;
    return out;
  }

 private:
  RVec xi_;
  Mat fwd_, bwd_;
};

template <typename Scalar>
QcqpResult<Scalar> solve_qcqp_single(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& k1,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& k,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& k2, double p,
    double rel_tol = 1e-9) {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  if (!(p > 0.0)) throw InfeasibleError("constraint budget must be positive");

  QcqpResult<Scalar> out;
  if (k.norm() == 0.0) {
    out.x = Vec::Zero(k.size());
    return out;
  }

  Eigen::LLT<Mat> llt_k2(k2);
  if (llt_k2.info() != Eigen::Success) throw ModelError("K2 is not positive definite");
  Eigen::LLT<Mat> llt_k1(k1);
  if (llt_k1.info() != Eigen::Success) throw ModelError("K1 is not positive definite");

  // Fast path: interior solution.
  const Vec x_free = llt_k1.solve(k);
  const double free_val = std::real(Scalar(x_free.adjoint() * k2 * x_free));
  if (free_val <= p) {
    out.x = x_free;
    return out;
  }
  out.constraint_active = true;

  const Mat l_inv = llt_k2.matrixL().solve(Mat::Identity(k.size(), k.size()));
  const Mat b = l_inv * k1 * l_inv.adjoint();
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (b + b.adjoint()));
  const RVec xi = es.eigenvalues();
  const Vec k_hat = es.eigenvectors().adjoint() * (l_inv * k);
  const RVec k_hat2 = k_hat.cwiseAbs2();

  const auto g = [&](double lambda) {
    double v = 0.0;
    for (Eigen::Index i = 0; i < xi.size(); ++i) {
      const double d = xi(i) + lambda;
      v += k_hat2(i) / (d * d);
    }
    return v - p;
  };

  double lo = 0.0, hi = std::max(1.0, xi.cwiseAbs().maxCoeff());
  while (g(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) throw ModelError("bisection bracket overflow");
  }
  const double tol = rel_tol * p;
  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < 400; ++it) {
    mid = 0.5 * (lo + hi);
    const double v = g(mid);
    ++out.bisect_iters;
    (v > 0.0 ? lo : hi) = mid;
    // complementary slackness needs lambda*|g| small as well
    if (std::abs(v) <= tol && std::max(1.0, mid) * std::abs(v) <= tol) break;
  }
  out.lambda = mid;
  // x(lambda) through the same transform: x = L^{-H} U (Xi + lambda)^{-1} k_hat
  Vec scaled = k_hat;
  for (Eigen::Index i = 0; i < xi.size(); ++i) scaled(i) /= (xi(i) + mid);
  out.x = l_inv.adjoint() * (es.eigenvectors() * scaled);
  return out;
}

}  // namespace emcris
