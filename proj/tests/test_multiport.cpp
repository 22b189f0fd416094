// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "emcris/coupling.hpp"
#include "emcris/linalg.hpp"
#include "emcris/network.hpp"
#include "test_support.hpp"

using namespace emcris;
using namespace emcris::testing;

namespace {
constexpr double kZ0 = 50.0;
constexpr double kLambda = 0.125;
}  // namespace

TEST_CASE("coupling matrix: single element has no coupling") {
  auto cm = CouplingModel::build(RisGeometry::square(1, 1, kLambda / 4, kLambda), kZ0);
  CHECK(cm.z_aa()(0, 0) == Complex(kZ0, 0.0));
  CHECK(std::abs(cm.s_aa()(0, 0)) < 1e-15);
}

TEST_CASE("coupling matrix: quarter-wavelength pair") {
  auto cm = CouplingModel::build(RisGeometry::square(2, 1, kLambda / 4, kLambda), kZ0);
  // j Z0 e^{-j pi/2} / (pi/2) = 100/pi
  const Complex expected = Complex(100.0 / kPi, 0.0);
  CHECK(std::abs(cm.z_aa()(0, 1) - expected) < 1e-12);
  CHECK(std::abs(cm.z_aa()(1, 0) - expected) < 1e-12);
  CHECK(cm.z_aa()(0, 0) == Complex(kZ0, 0.0));
  // mutual resistance is the sinc kernel
  CHECK(std::abs(cm.z_aa()(0, 1).real() - kZ0 * std::sin(kPi / 2) / (kPi / 2)) < 1e-12);
}

TEST_CASE("coupling matrix: section-V operating point is realizable") {
  auto cm = CouplingModel::build(RisGeometry::square(10, 10, kLambda / 4, kLambda), kZ0);
  const RMat re = 0.5 * (cm.z_aa().real() + cm.z_aa().real().transpose());
  const double min_ev = min_eigenvalue_sym(re);
  // PSD within roundoff; the numerically null tail is handled by the
  // clamped square root inside the model.
  CHECK(min_ev > -1e-9 * re.diagonal().maxCoeff());
  CHECK(cm.re_sqrt().allFinite());
  CHECK(cm.re_sqrt_inv().allFinite());
  // roots are consistent: Re^{1/2} * Re^{-1/2} stays well conditioned
  const RMat prod = cm.re_sqrt() * cm.re_sqrt_inv();
  CHECK((prod - RMat::Identity(100, 100)).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("coupling matrix: indefinite impedance is rejected") {
  // A symmetric Z whose real part has a negative eigenvalue.
  CMat z(2, 2);
  z << Complex(50, 0), Complex(80, 0), Complex(80, 0), Complex(50, 0);
  CHECK_THROWS_AS(CouplingModel::from_impedance(z, 50.0), ModelError);
}

TEST_CASE("coupling matrix: physical-distance metric matches index metric on a row array") {
  const auto geom = RisGeometry::square(4, 1, kLambda / 8, kLambda);
  auto a = CouplingModel::build(geom, kZ0, CouplingMetric::kIndexDistance);
  auto b = CouplingModel::build(geom, kZ0, CouplingMetric::kPhysicalDistance);
  CHECK(rel_err(a.z_aa(), b.z_aa()) < 1e-14);
}

TEST_CASE("gamma_from_state") {
  CHECK(rel_err(gamma_from_state(ReflectionState::uniform(3, 1.0, 0.0)),
                CMat::Identity(3, 3)) < 1e-15);

  auto g = gamma_from_state(ReflectionState::uniform(1, 2.0, kPi / 2));
  CHECK(std::abs(g(0, 0) - Complex(-2.0, 0.0)) < 1e-12);

  auto g2 = gamma_from_state(ReflectionState::uniform(1, 1.0, 0.0, 0.9));
  CHECK(std::abs(g2(0, 0) - Complex(0.81, 0.0)) < 1e-12);
}

TEST_CASE("impedance_from_gamma") {
  const CMat zero = CMat::Zero(2, 2);
  CHECK(rel_err(impedance_from_gamma(zero, kZ0), kZ0 * CMat::Identity(2, 2)) < 1e-15);

  CMat gj = CMat::Zero(1, 1);
  gj(0, 0) = kJ;
  CHECK(std::abs(impedance_from_gamma(gj, kZ0)(0, 0) - Complex(0.0, 50.0)) < 1e-12);

  CMat ga = CMat::Zero(1, 1);
  ga(0, 0) = Complex(-2.0, 0.0);
  CHECK(std::abs(impedance_from_gamma(ga, kZ0)(0, 0) - Complex(-50.0 / 3.0, 0.0)) < 1e-12);

  CMat open = CMat::Zero(1, 1);
  open(0, 0) = Complex(1.0, 0.0);
  CHECK_THROWS_AS(impedance_from_gamma(open, kZ0), ModelError);
}

TEST_CASE("gamma <-> impedance round trip") {
  RngStream rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    auto st = random_state(4, rng);
    const CMat g = gamma_from_state(st);
    const CMat z = impedance_from_gamma(g, kZ0);
    // forward map per element
    for (int i = 0; i < 4; ++i) {
      const Complex back = (z(i, i) - kZ0) / (z(i, i) + kZ0);
      CHECK(std::abs(back - g(i, i)) < 1e-12 * std::max(1.0, std::abs(g(i, i))));
    }
  }
}

TEST_CASE("s_from_z_coupling") {
  auto ident = CouplingModel::identity(3, kZ0);
  CHECK(s_from_z_coupling(ident).cwiseAbs().maxCoeff() < 1e-14);

  CMat z1(1, 1);
  z1(0, 0) = 100.0;
  auto cm1 = CouplingModel::from_impedance(z1, kZ0);
  CHECK(std::abs(cm1.s_aa()(0, 0) - Complex(1.0 / 3.0, 0.0)) < 1e-14);

  RngStream rng(7);
  auto cm = random_coupling(4, kZ0, rng);
  const CMat s = s_from_z_coupling(cm);
  const CMat lhs = (CMat::Identity(4, 4) - s) * cm.z_aa_plus();
  CHECK((lhs - 2.0 * kZ0 * CMat::Identity(4, 4)).norm() < 1e-10 * cm.z_aa().norm());
}

TEST_CASE("effective_channels_s degenerate reflections") {
  RngStream rng(3);
  auto cm = random_coupling(4, kZ0, rng);
  auto z_links = random_z_links(4, 2, 2, 1, 1, rng);
  auto s_links = s_links_from_z_links(z_links, cm);

  auto eff0 = effective_channels_s(CMat::Zero(4, 4), cm, s_links);
  CHECK(rel_err_row(eff0.ue[0], s_links.bs_ue[0]) < 1e-14);
  CHECK(eff0.out_bs.norm() < 1e-14);

  auto ident = CouplingModel::identity(4, kZ0);
  auto si_links = s_links_from_z_links(z_links, ident);
  auto eff1 = effective_channels_s(CMat::Identity(4, 4), ident, si_links);
  CHECK(rel_err_row(eff1.ue[0], si_links.bs_ue[0] + si_links.ris_ue[0] * si_links.bs_ris) <
        1e-12);
}

TEST_CASE("effective_channels_s oscillation guard") {
  auto cm = CouplingModel::identity(2, kZ0);
  CMat s_aa = 0.5 * CMat::Identity(2, 2);
  // hand-build a coupling model whose S_AA is 0.5 I: Z = Z0 (I+S)(I-S)^{-1} = 3 Z0 I
  auto cm3 = CouplingModel::from_impedance(CMat(3.0 * kZ0 * CMat::Identity(2, 2)), kZ0);
  CHECK(rel_err(cm3.s_aa(), s_aa) < 1e-14);
  RngStream rng(5);
  auto z_links = random_z_links(2, 2, 2, 1, 1, rng);
  auto s_links = s_links_from_z_links(z_links, cm3);
  CHECK_THROWS_AS(effective_channels_s(CMat(2.0 * CMat::Identity(2, 2)), cm3, s_links),
                  ModelError);
  (void)cm;
}

TEST_CASE("effective_channels_z: no surface path") {
  RngStream rng(9);
  auto cm = random_coupling(3, kZ0, rng);
  auto z_links = random_z_links(3, 2, 2, 1, 1, rng);
  z_links.ris_ue[0].setZero();
  const CMat z_a = impedance_from_gamma(gamma_from_state(random_state(3, rng)), kZ0);
  auto eff = effective_channels_z(z_a, cm, z_links);
  CHECK(rel_err_row(eff.ue[0], CRow(z_links.bs_ue[0] / (2.0 * kZ0))) < 1e-14);
}

TEST_CASE("theorem 1: S-form and Z-form agree on all six operators") {
  RngStream rng(2024);
  double worst = 0.0;
  for (int trial = 0; trial < 60; ++trial) {
    const int m = 2 + static_cast<int>(rng.uniform(0.0, 7.0));   // 2..8
    const int n = 1 + static_cast<int>(rng.uniform(0.0, 4.0));   // 1..4
    const int nj = 1 + static_cast<int>(rng.uniform(0.0, 3.0));  // 1..3
    const int k = 1 + static_cast<int>(rng.uniform(0.0, 3.0));   // 1..3
    const int q = 1 + static_cast<int>(rng.uniform(0.0, 2.0));   // 1..2
    auto cm = random_coupling(m, kZ0, rng);
    auto z_links = random_z_links(m, n, nj, k, q, rng);
    auto st = random_state(m, rng);
    const CMat gamma = gamma_from_state(st);
    const CMat z_a = impedance_from_gamma(gamma, kZ0);

    auto s_links = s_links_from_z_links(z_links, cm);
    auto eff_s = effective_channels_s(gamma, cm, s_links);
    auto eff_z = effective_channels_z(z_a, cm, z_links);
    worst = std::max(worst, max_rel_err(eff_s, eff_z));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("link conversion limits") {
  RngStream rng(17);
  const int m = 4;
  auto ident = CouplingModel::identity(m, kZ0);
  auto z_links = random_z_links(m, 2, 2, 2, 1, rng);

  auto s_links = s_links_from_z_links(z_links, ident);
  CHECK(rel_err(s_links.bs_ris, CMat(z_links.bs_ris / (2.0 * kZ0))) < 1e-14);
  CHECK(rel_err_row(s_links.ris_ue[0], CRow(z_links.ris_ue[0] / (2.0 * kZ0))) < 1e-14);

  z_links.bs_ris.setZero();
  auto s2 = s_links_from_z_links(z_links, ident);
  CHECK(s2.bs_ris.norm() == 0.0);
  CHECK(rel_err_row(s2.bs_ue[0], CRow(z_links.bs_ue[0] / (2.0 * kZ0))) < 1e-14);
}

TEST_CASE("power matching network structure") {
  auto ident = CouplingModel::identity(3, kZ0);
  const CMat zd = pmn_decoupling(ident);
  CHECK(rel_err(CMat(zd.block(0, 3, 3, 3)), CMat(-kJ * kZ0 * CMat::Identity(3, 3))) < 1e-14);
  CHECK(zd.block(3, 3, 3, 3).norm() < 1e-14);

  RngStream rng(21);
  auto cm = random_coupling(5, kZ0, rng);
  const CMat zd2 = pmn_decoupling(cm);
  CHECK((zd2 - zd2.transpose()).norm() == 0.0);  // exact by construction
  CHECK(zd2.real().cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("decoupled load") {
  auto ident = CouplingModel::identity(3, kZ0);
  CHECK(rel_err(decoupled_load(CMat(kZ0 * CMat::Identity(3, 3)), ident),
                kZ0 * CMat::Identity(3, 3)) < 1e-14);

  RngStream rng(23);
  auto st = random_state(3, rng);
  const CMat z_a = impedance_from_gamma(gamma_from_state(st), kZ0);
  const CMat z_d = decoupled_load(z_a, ident);
  CHECK(rel_err(z_d, CMat(kZ0 * kZ0 * z_a.inverse())) < 1e-12);
}

TEST_CASE("theorem 2: decoupled channels equal Z-form with matched load") {
  RngStream rng(31);
  double worst = 0.0;
  for (int trial = 0; trial < 60; ++trial) {
    const int m = 2 + static_cast<int>(rng.uniform(0.0, 7.0));
    const int n = 1 + static_cast<int>(rng.uniform(0.0, 4.0));
    const int k = 1 + static_cast<int>(rng.uniform(0.0, 3.0));
    const int q = 1 + static_cast<int>(rng.uniform(0.0, 2.0));
    auto cm = random_coupling(m, kZ0, rng);
    auto z_links = random_z_links(m, n, 2, k, q, rng);
    auto st = random_state(m, rng, 8, trial % 2 ? 0.9 : 1.0);

    const CMat z_a = impedance_from_gamma(gamma_from_state(st), kZ0);
    auto eff_sub = effective_channels_z(decoupled_load(z_a, cm), cm, z_links);
    auto eff_da = da_channels(st, cm, z_links);
    worst = std::max(worst, max_rel_err(eff_da, eff_sub));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("decoupled channels degenerate cases") {
  RngStream rng(37);
  const int m = 3;
  auto cm = random_coupling(m, kZ0, rng);
  auto z_links = random_z_links(m, 2, 2, 1, 1, rng);

  // Gamma_A = -I wipes out the surface path.
  auto st = ReflectionState::uniform(m, 1.0, kPi / 2.0);
  auto eff = da_channels(st, cm, z_links);
  CHECK(rel_err_row(eff.ue[0], CRow(z_links.bs_ue[0] / (2.0 * kZ0))) < 1e-13);

  // Uncoupled surface with unit reflection.
  auto ident = CouplingModel::identity(m, kZ0);
  auto st1 = ReflectionState::uniform(m, 1.0, 0.0);
  auto eff1 = da_channels(st1, ident, z_links);
  const CRow expect =
      (z_links.bs_ue[0] - z_links.ris_ue[0] * z_links.bs_ris / kZ0) / (2.0 * kZ0);
  CHECK(rel_err_row(eff1.ue[0], expect) < 1e-13);
}

TEST_CASE("uncoupled degeneration matches the classical cascade") {
  RngStream rng(41);
  const int m = 4;
  auto ident = CouplingModel::identity(m, kZ0);
  auto z_links = random_z_links(m, 2, 2, 2, 1, rng);
  auto st = random_state(m, rng);
  const CMat gamma = gamma_from_state(st);

  // S-form: with S_AA = 0 the channel is exactly the classical uncoupled
  // active-surface cascade direct + S_RU Gamma S_BR.
  auto s_links = s_links_from_z_links(z_links, ident);
  CHECK(ident.s_aa().norm() < 1e-14);
  auto eff_s = effective_channels_s(gamma, ident, s_links);
  const CRow classic = s_links.bs_ue[0] + s_links.ris_ue[0] * gamma * s_links.bs_ris;
  CHECK(rel_err_row(eff_s.ue[0], classic) < 1e-12);

  // Decoupled form: same cascade structure with the matched-load response
  // -(Gamma + I)/2 in place of Gamma (the matching network is part of the
  // model, so the responses differ by design).
  auto eff_da = da_channels(st, ident, z_links);
  const CMat gt = gamma + CMat::Identity(m, m);
  const CRow classic_da =
      (z_links.bs_ue[0] - z_links.ris_ue[0] * gt * z_links.bs_ris / (2.0 * kZ0)) /
      (2.0 * kZ0);
  CHECK(rel_err_row(eff_da.ue[0], classic_da) < 1e-12);
}
