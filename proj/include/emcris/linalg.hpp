// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "emcris/types.hpp"

namespace emcris {

// Square root and inverse square root of a real symmetric positive definite
// matrix via eigendecomposition.  Throws ModelError when any eigenvalue falls
// below eps_rel * max eigenvalue: an explicit failure beats a silent complex
// root.
struct SymSqrt {
  RMat sqrt;
  RMat inv_sqrt;
};
SymSqrt sym_sqrt_pd(const RMat& a, double eps_rel = 1e-9);

// Same, but eigenvalues inside [-eps_rel, +eps_rel] * max are clamped up to
// the floor instead of rejected; only a genuinely indefinite matrix throws.
// Used for radiation-resistance matrices of dense arrays, whose spectra are
// PSD with a numerically null tail below half-wavelength spacing.
SymSqrt sym_sqrt_psd_clamped(const RMat& a, double eps_rel = 1e-9);

// Hermitian PSD square root; eigenvalues below -tol_rel * max are an error,
// small negatives are clamped to zero.
CMat herm_sqrt_psd(const CMat& a, double tol_rel = 1e-10);

// (a + a^H) / 2 — absorbs assembly roundoff before PSD-dependent steps.
CMat hermitize(const CMat& a);

double min_eigenvalue_sym(const RMat& a);
double min_eigenvalue_herm(const CMat& a);

// Reciprocal condition estimate through partial-pivoting LU.
double rcond(const CMat& a);

}  // namespace emcris
