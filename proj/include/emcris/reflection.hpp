// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "emcris/types.hpp"

namespace emcris {

// Discrete phase alphabet F = { k * 2*pi / 2^b : k = 0 .. 2^b-1 }.
RVec phase_set(int bits);

// Nearest member of F (ties resolved toward the smaller phase).
double snap_to_phase_set(double theta, int bits);

// Per-element amplitudes and discrete phases of the active surface, plus the
// phase-shifter insertion loss.  Reflection coefficient of element m is
// l_ps^2 * alpha_m * exp(j*2*theta_m).
struct ReflectionState {
  RVec alpha;
  RVec theta;
  double l_ps = 1.0;

  int size() const { return static_cast<int>(alpha.size()); }

  // Throws unless alpha >= 0, l_ps in (0,1], theta on the 2^bits grid and
  // l_ps^2*alpha <= gamma_max (when gamma_max > 0).
  void validate(double gamma_max = -1.0, int bits = -1) const;

  static ReflectionState uniform(int m, double alpha, double theta, double l_ps = 1.0);
};

// Diagonal of the reflection matrix: l_ps^2 * alpha_m * exp(j*2*theta_m).
CVec gamma_diag(const ReflectionState& state);

// Reflection coefficient matrix (diagonal M x M).
CMat gamma_from_state(const ReflectionState& state);

// Diagonal of Gamma_A + I, the decoupled-form reflection response.
CVec gamma_tilde_diag(const ReflectionState& state);

}  // namespace emcris
