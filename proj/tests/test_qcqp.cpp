// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "emcris/qcqp.hpp"
#include "test_support.hpp"

using namespace emcris;
using namespace emcris::testing;

namespace {

CMat random_hpd(int n, RngStream& rng, double ridge = 0.5) {
  CMat a = rng.cgaussian(n, n);
  return CMat(a * a.adjoint() / n + ridge * CMat::Identity(n, n));
}

double objective(const CMat& k1, const CVec& k, const CVec& x) {
  return (x.adjoint() * k1 * x)(0).real() - 2.0 * (k.adjoint() * x)(0).real();
}

// Projected gradient reference: gradient steps on the objective with exact
// projection onto { x : x^H K2 x <= P } via scaling in the K2 metric after a
// change of variables y = K2^{1/2} x.
CVec projected_gradient(const CMat& k1, const CVec& k, const CMat& k2, double p,
                        int iters = 200000) {
  Eigen::SelfAdjointEigenSolver<CMat> es(k2);
  const CMat k2_half = es.operatorSqrt();
  const CMat k2_half_inv = es.operatorInverseSqrt();
  const CMat a = k2_half_inv * k1 * k2_half_inv;  // objective matrix in y
  const CVec b = k2_half_inv * k;
  Eigen::SelfAdjointEigenSolver<CMat> esa(a);
  const double step = 0.9 / esa.eigenvalues().maxCoeff();
  CVec y = CVec::Zero(k.size());
  for (int i = 0; i < iters; ++i) {
    y -= step * (a * y - b);
    const double nrm2 = y.squaredNorm();
    if (nrm2 > p) y *= std::sqrt(p / nrm2);
  }
  return k2_half_inv * y;
}

}  // namespace

TEST_CASE("trivial cases") {
  const CMat eye = CMat::Identity(3, 3);
  auto r0 = solve_qcqp_single<Complex>(eye, CVec::Zero(3), eye, 1.0);
  CHECK(r0.x.norm() == 0.0);
  CHECK(r0.lambda == 0.0);

  // ||k||^2 = 4, P = 1: projection onto the unit ball, lambda = 1.
  CVec k(2);
  k << Complex(1.2, -0.8), Complex(0.6, 1.4);
  k *= 2.0 / k.norm();
  const CMat eye2 = CMat::Identity(2, 2);
  auto r = solve_qcqp_single<Complex>(eye2, k, eye2, 1.0);
  CHECK(r.constraint_active);
  CHECK(r.lambda == doctest::Approx(1.0).epsilon(1e-6));
  CHECK((r.x - k / 2.0).norm() < 1e-8);
}

TEST_CASE("interior optimum returns the unconstrained solution") {
  RngStream rng(3);
  const CMat k1 = random_hpd(4, rng);
  const CMat k2 = random_hpd(4, rng);
  CVec k = rng.cgaussian(4, 1).col(0) * 1e-3;
  auto r = solve_qcqp_single<Complex>(k1, k, k2, 10.0);
  CHECK(!r.constraint_active);
  CHECK((k1 * r.x - k).norm() < 1e-10 * k.norm());
}

TEST_CASE("KKT residuals on random instances") {
  RngStream rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform(0.0, 7.0));
    const CMat k1 = random_hpd(n, rng);
    const CMat k2 = random_hpd(n, rng);
    const CVec k = 3.0 * rng.cgaussian(n, 1).col(0);
    const double p = rng.uniform(0.1, 2.0);
    auto r = solve_qcqp_single<Complex>(k1, k, k2, p);

    // stationarity
    const CVec resid = (k1 + r.lambda * k2) * r.x - k;
    CHECK(resid.norm() < 1e-8 * k.norm());
    // primal feasibility
    const double cval = (r.x.adjoint() * k2 * r.x)(0).real();
    CHECK(cval <= p * (1.0 + 1e-8));
    // complementary slackness
    CHECK(std::abs(r.lambda * (cval - p)) < 1e-8 * p);
    if (r.constraint_active) CHECK(std::abs(cval - p) < 1e-9 * p * 10);
  }
}

TEST_CASE("objective matches a projected-gradient reference") {
  RngStream rng(7);
  for (int trial = 0; trial < 8; ++trial) {
    const int n = 6;
    const CMat k1 = random_hpd(n, rng);
    const CMat k2 = random_hpd(n, rng);
    const CVec k = 2.0 * rng.cgaussian(n, 1).col(0);
    const double p = rng.uniform(0.2, 1.5);
    auto r = solve_qcqp_single<Complex>(k1, k, k2, p);
    const CVec x_ref = projected_gradient(k1, k, k2, p);
    CHECK(objective(k1, k, r.x) <= objective(k1, k, x_ref) + 1e-6 * std::abs(objective(k1, k, x_ref)) + 1e-9);
  }
}

TEST_CASE("real-valued instantiation") {
  RngStream rng(9);
  RMat a(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) a(i, j) = rng.normal();
  const RMat k1 = a * a.transpose() / 3 + RMat::Identity(3, 3);
  const RMat k2 = RMat::Identity(3, 3);
  RVec k(3);
  k << 3.0, -2.0, 1.0;
  auto r = solve_qcqp_single<double>(k1, k, k2, 0.5);
  CHECK(r.x.squaredNorm() <= 0.5 * (1 + 1e-9));
  const RVec resid = (k1 + r.lambda * k2) * r.x - k;
  CHECK(resid.norm() < 1e-8 * k.norm());
}
