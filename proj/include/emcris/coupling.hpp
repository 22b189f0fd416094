// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "emcris/geometry.hpp"
#include "emcris/linalg.hpp"
#include "emcris/types.hpp"

namespace emcris {

// Distance used by the coupling formula: linear element-index difference
// (as the closed form is written) or the physical distance between element
// coordinates.  Index distance is the default.
enum class CouplingMetric { kIndexDistance, kPhysicalDistance };

// The M x M impedance matrix Z_AA of the surface together with the derived
// quantities every consumer needs: S_AA, Z_AA + Z0 I and the +-1/2 powers of
// Re{Z_AA}.  Immutable after construction.
class CouplingModel {
 public:
  CouplingModel() = default;  // empty model, assign a built one before use

  // Z_AA(i,j) = j * Z0 * exp(-j*2*pi*d|i-j|/lambda) / (2*pi*d|i-j|/lambda) off
  // the diagonal (mutual resistance Z0 sinc), Z_AA(i,i) = Z0.  Fails when
  // Re{Z_AA} is not positive semi-definite (not physically realizable).
  static CouplingModel build(const RisGeometry& geom, double z0,
                             CouplingMetric metric = CouplingMetric::kIndexDistance);

  // Wrap an explicit impedance matrix (tests, uncoupled baseline).
  static CouplingModel from_impedance(CMat z_aa, double z0);

  // Uncoupled surface: Z_AA = Z0 I.
  static CouplingModel identity(int m, double z0);

  int size() const { return static_cast<int>(z_aa_.rows()); }
  double z0() const { return z0_; }
  const CMat& z_aa() const { return z_aa_; }
  const CMat& s_aa() const { return s_aa_; }
  const CMat& z_aa_plus() const { return z_aa_plus_; }   // Z_AA + Z0 I
  const RMat& re_sqrt() const { return re_sqrt_; }       // Re{Z_AA}^{1/2}
  const RMat& re_sqrt_inv() const { return re_sqrt_inv_; }
  const RMat& im_part() const { return im_part_; }       // Im{Z_AA}
  const CMat& z_bar_aa() const { return z_bar_aa_; }     // Re^{-1/2} Z_AA^+
  const CMat& z_tilde_aa() const { return z_tilde_aa_; } // Z_AA^+ Re^{-1/2}

 private:
  void finalize();

  CMat z_aa_;
  double z0_ = 0.0;
  CMat s_aa_;
  CMat z_aa_plus_;
  RMat re_sqrt_;
  RMat re_sqrt_inv_;
  RMat im_part_;
  CMat z_bar_aa_;
  CMat z_tilde_aa_;
};

// S_AA = (Z_AA + Z0 I)^{-1} (Z_AA - Z0 I).
CMat s_from_z_coupling(const CouplingModel& cm);

// Inverts Gamma = (Z + Z0 I)^{-1}(Z - Z0 I) for a diagonal load:
// Z = Z0 (I + Gamma)(I - Gamma)^{-1}.  A diagonal entry of 1 means an
// open-circuit load and is an error.
CMat impedance_from_gamma(const CMat& gamma, double z0);

// Lossless reciprocal power-matching network as a 2M x 2M block impedance
// matrix: [[0, -j sqrt(Z0) Re^{1/2}], [-j sqrt(Z0) Re^{1/2}, -j Im{Z_AA}]].
CMat pmn_decoupling(const CouplingModel& cm);

// Load seen through the matching network:
// Z_A^D = -j Im{Z_AA} + Z0 Re^{1/2} Z_A^{-1} Re^{1/2}.
CMat decoupled_load(const CMat& z_a, const CouplingModel& cm);

}  // namespace emcris
