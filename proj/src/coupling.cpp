// SPDX-License-Identifier: Apache-2.0
#include "emcris/coupling.hpp"

#include <Eigen/LU>

namespace emcris {

CouplingModel CouplingModel::build(const RisGeometry& geom, double z0, CouplingMetric metric) {
  geom.validate();
  if (!(z0 > 0.0)) throw ModelError("reference impedance must be positive");
  const int m = geom.size();
  CMat z(m, m);
  const Eigen::Matrix3Xd u = geom.element_positions();
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (i == j) {
        z(i, j) = z0;
        continue;
      }
      const double dist = (metric == CouplingMetric::kIndexDistance)
                              ? geom.d_s * std::abs(i - j)
                              : (u.col(i) - u.col(j)).norm();
      const double x = 2.0 * kPi * dist / geom.lambda_c;
      // j Z0 e^{-jx}/x: mutual resistance Z0 sin(x)/x, reactance Z0 cos(x)/x.
      // The sin(x)/x real part is what keeps Re{Z_AA} positive semi-definite
      // and continuous with the Z0 diagonal as x -> 0.
      z(i, j) = kJ * z0 * std::exp(-kJ * x) / x;
    }
  }
  return from_impedance(std::move(z), z0);
}

CouplingModel CouplingModel::from_impedance(CMat z_aa, double z0) {
  if (z_aa.rows() != z_aa.cols() || z_aa.rows() < 1) throw ModelError("Z_AA must be square");
  if ((z_aa - z_aa.transpose()).cwiseAbs().maxCoeff() >
      1e-10 * std::max(1.0, z_aa.cwiseAbs().maxCoeff())) {
    throw ModelError("Z_AA must be symmetric (reciprocity)");
  }
  CouplingModel cm;
  cm.z_aa_ = std::move(z_aa);
  cm.z0_ = z0;
  cm.finalize();
  return cm;
}

CouplingModel CouplingModel::identity(int m, double z0) {
  return from_impedance(CMat(z0 * CMat::Identity(m, m)), z0);
}

void CouplingModel::finalize() {
  const int m = size();
  z_aa_plus_ = z_aa_ + z0_ * CMat::Identity(m, m);

  Eigen::PartialPivLU<CMat> lu(z_aa_plus_);
  if (lu.rcond() < 1e-14) throw ModelError("degenerate coupling matrix");
  s_aa_ = lu.solve(z_aa_ - z0_ * CMat::Identity(m, m));

  const RMat re = 0.5 * (z_aa_.real() + z_aa_.real().transpose());
  im_part_ = 0.5 * (z_aa_.imag() + z_aa_.imag().transpose());
  SymSqrt roots;
  try {
    roots = sym_sqrt_psd_clamped(re);
  } catch (const ModelError&) {
    throw ModelError("coupling model not physically realizable at this spacing");
  }
  re_sqrt_ = std::move(roots.sqrt);
  re_sqrt_inv_ = std::move(roots.inv_sqrt);
  z_bar_aa_ = re_sqrt_inv_ * z_aa_plus_;
  z_tilde_aa_ = z_aa_plus_ * re_sqrt_inv_;
}

CMat s_from_z_coupling(const CouplingModel& cm) { return cm.s_aa(); }

CMat impedance_from_gamma(const CMat& gamma, double z0) {
  const int m = static_cast<int>(gamma.rows());
  CMat z = CMat::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    const Complex g = gamma(i, i);
    if (std::abs(Complex(1.0, 0.0) - g) < 1e-12) {
      throw ModelError("unit reflection coefficient: open-circuit load");
    }
    z(i, i) = z0 * (Complex(1.0, 0.0) + g) / (Complex(1.0, 0.0) - g);
  }
  return z;
}

CMat pmn_decoupling(const CouplingModel& cm) {
  const int m = cm.size();
  CMat zd = CMat::Zero(2 * m, 2 * m);
  const CMat off = -kJ * std::sqrt(cm.z0()) * cm.re_sqrt();
  zd.block(0, m, m, m) = off;
  zd.block(m, 0, m, m) = off;
  zd.block(m, m, m, m) = -kJ * cm.im_part();
  return zd;
}

CMat decoupled_load(const CMat& z_a, const CouplingModel& cm) {
  Eigen::PartialPivLU<CMat> lu(z_a);
  if (lu.rcond() < 1e-14) throw ModelError("singular load impedance");
  const CMat inv = lu.inverse();
  return -kJ * cm.im_part() + cm.z0() * cm.re_sqrt() * inv * cm.re_sqrt();
}

}  // namespace emcris
