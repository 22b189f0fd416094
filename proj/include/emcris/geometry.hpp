// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "emcris/types.hpp"

namespace emcris {

// Uniform planar array of reflection elements, M_h columns per row stacked
// row-major: element o sits at [0, mod(o,M_h)*d_h, floor(o/M_h)*d_v].
struct RisGeometry {
  int m_h = 1;          // horizontal count
  int m_v = 1;          // vertical count
  double d_s = 0.0;     // inter-element spacing used by the coupling model [m]
  double d_h = 0.0;     // horizontal pitch [m]
  double d_v = 0.0;     // vertical pitch [m]
  double lambda_c = 0.0;  // carrier wavelength [m]

  int size() const { return m_h * m_v; }

  // 3 x M element coordinates, array plane x = 0, boresight +x.
  Eigen::Matrix3Xd element_positions() const;

  void validate() const;

  static RisGeometry square(int m_h, int m_v, double spacing, double lambda_c) {
    return RisGeometry{m_h, m_v, spacing, spacing, spacing, lambda_c};
  }
};

// Node layout of one scenario realization.
struct NodeGeometry {
  Eigen::Vector3d bs_pos;
  Eigen::Vector3d ris_pos;
  std::vector<Eigen::Vector3d> ue_pos;
  std::vector<Eigen::Vector3d> jam_pos;
  int n_bs = 1;   // BS antenna count N
  int n_jam = 1;  // jammer antenna count N_J
  double antenna_spacing = 0.0;  // ULA element spacing [m]

  // ULA element coordinates along the array axis (y), first element at 0.
  RVec ula_positions(int n) const {
    RVec x(n);
    for (int i = 0; i < n; ++i) x(i) = i * antenna_spacing;
    return x;
  }

  void validate() const;
};

}  // namespace emcris
