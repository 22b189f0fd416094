// SPDX-License-Identifier: Apache-2.0
#include "emcris/reflection.hpp"

#include <cmath>

#include "emcris/geometry.hpp"

namespace emcris {

RVec phase_set(int bits) {
  if (bits < 1 || bits > 20) throw ModelError("phase bits out of range");
  const int levels = 1 << bits;
  RVec f(levels);
  for (int k = 0; k < levels; ++k) f(k) = 2.0 * kPi * k / levels;
  return f;
}

double snap_to_phase_set(double theta, int bits) {
  const int levels = 1 << bits;
  const double step = 2.0 * kPi / levels;
  double t = std::fmod(theta, 2.0 * kPi);
  if (t < 0) t += 2.0 * kPi;
  int k = static_cast<int>(std::lround(t / step)) % levels;
  // round-half behavior does not matter for correctness, fmod keeps k valid
  return k * step;
}

void ReflectionState::validate(double gamma_max, int bits) const {
  if (alpha.size() != theta.size()) throw ModelError("alpha/theta size mismatch");
  if (!(l_ps > 0.0 && l_ps <= 1.0)) throw ModelError("insertion loss must be in (0,1]");
  for (int m = 0; m < size(); ++m) {
    if (alpha(m) < 0.0) throw ModelError("negative amplitude");
    if (gamma_max > 0.0 && l_ps * l_ps * alpha(m) > gamma_max * (1.0 + 1e-12)) {
      throw ModelError("amplitude exceeds the reflection cap");
    }
    if (bits > 0) {
      const double snapped = snap_to_phase_set(theta(m), bits);
      const double d = std::abs(std::remainder(theta(m) - snapped, 2.0 * kPi));
      if (d > 1e-9) throw ModelError("phase off the discrete grid");
    }
  }
}

ReflectionState ReflectionState::uniform(int m, double alpha, double theta, double l_ps) {
  ReflectionState s;
  s.alpha = RVec::Constant(m, alpha);
  s.theta = RVec::Constant(m, theta);
  s.l_ps = l_ps;
  return s;
}

CVec gamma_diag(const ReflectionState& state) {
  const double scale = state.l_ps * state.l_ps;
  CVec g(state.size());
  for (int m = 0; m < state.size(); ++m) {
    g(m) = scale * state.alpha(m) * std::exp(kJ * (2.0 * state.theta(m)));
  }
  return g;
}

CMat gamma_from_state(const ReflectionState& state) {
  return CMat(gamma_diag(state).asDiagonal());
}

CVec gamma_tilde_diag(const ReflectionState& state) {
  return gamma_diag(state).array() + Complex(1.0, 0.0);
}

Eigen::Matrix3Xd RisGeometry::element_positions() const {
  Eigen::Matrix3Xd u(3, size());
  for (int o = 0; o < size(); ++o) {
    u(0, o) = 0.0;
    u(1, o) = (o % m_h) * d_h;
    u(2, o) = (o / m_h) * d_v;
  }
  return u;
}

void RisGeometry::validate() const {
  if (m_h < 1 || m_v < 1) throw ModelError("element counts must be positive");
  if (!(d_s > 0.0) || !(lambda_c > 0.0)) throw ModelError("spacing and wavelength must be positive");
  if (!(d_h > 0.0) || !(d_v > 0.0)) throw ModelError("element pitch must be positive");
}

void NodeGeometry::validate() const {
  if (n_bs < 1 || n_jam < 1) throw ModelError("antenna counts must be positive");
  auto check = [&](const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
    if ((a - b).norm() <= 0.0) throw ModelError("coincident nodes");
  };
  check(bs_pos, ris_pos);
  for (const auto& u : ue_pos) {
    check(u, bs_pos);
    check(u, ris_pos);
  }
  for (const auto& j : jam_pos) {
    check(j, ris_pos);
    for (const auto& u : ue_pos) check(j, u);
  }
}

}  // namespace emcris
