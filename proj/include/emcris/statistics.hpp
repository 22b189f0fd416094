// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "emcris/channel.hpp"
#include "emcris/coupling.hpp"
#include "emcris/network.hpp"
#include "emcris/reflection.hpp"
#include "emcris/types.hpp"

namespace emcris {

// E[Z^H A Z] for Z ~ CN(mu, Sigma1 (x) Sigma2):
// mu^H A mu + Tr(A Sigma1) Sigma2.
CMat gaussian_quadratic_expectation(const CMat& mu, const CMat& sigma1, const CMat& sigma2,
                                    const CMat& a);

// Per-jammer, per-UE jamming precoders.
struct JammerStrategy {
  std::vector<std::vector<CVec>> w;  // [q][k], length N_J

  int num_jammers() const { return static_cast<int>(w.size()); }
  double power(int q) const {
    double p = 0.0;
    for (const auto& v : w[q]) p += v.squaredNorm();
    return p;
  }
};

struct NoiseParams {
  double sigma_r2 = 0.0;  // surface amplifier noise power
  double sigma_k2 = 0.0;  // UE noise power
};

// Everything about the scenario statistics that does not depend on the
// reflection state.  Built once, shared by surrogate assembly and the solver.
struct StatContext {
  int m = 0, n = 0, n_j = 0, k = 0, q = 0;
  double z0 = 0.0;

  // Direct-link second moments (1/(2Z0)^2)(mu^H mu + s^2 [M] Sigma_tx).
  std::vector<CMat> r_bu;                  // per k, N x N
  std::vector<std::vector<CMat>> r_ju;     // [q][k], N_J x N_J
  std::vector<CMat> r_ru;                  // per k, M x M
  CMat r_br;                               // N x N (carries the Tr(Sigma_R)=M factor)
  std::vector<CMat> r_jr;                  // per q (same factor)

  // Decoupled-side statistics (B = Re{Z_AA}^{-1/2}).
  std::vector<CMat> r_ru_tilde;            // per k: B (mu^H mu + s^2 Sigma_R) B
  std::vector<CMat> r_ru_tilde_sqrt;       // PSD roots of the above
  CMat mu_br_tilde;                        // B mu_BR
  std::vector<CMat> mu_jr_tilde;           // per q
  CMat sigma_r_tilde;                      // B Sigma_R B

  // Hadamard reductions of the trace terms to quadratic forms in diag(Gamma~).
  std::vector<CMat> sigma_ru_tilde;        // per k: r_ru_tilde o sigma_r_tilde^T
  std::vector<CMat> sigma_c3;              // per k: (1/(4Z0)^2) r_ru_tilde o (Zbar Zbar^H)^T
  CMat sigma_bar_a;                        // (Z~^H Z~) o sigma_r_tilde^T
  CMat sigma_hat_a;                        // (1/(4Z0)^2)(Z~^H Z~) o (Zbar Zbar^H)^T

  CMat gram_z_tilde;                       // Z~^H Z~
  double tr_r_aa_plus = 0.0;               // Tr((Z_AA^+)^H Z_AA^+)

  // Roots reused by the solver.
  std::vector<CMat> r_bu_sqrt;             // per k
  CMat sigma_b_sqrt;
  std::vector<CMat> sigma_j_sqrt;
  CMat sigma_b;
  std::vector<CMat> sigma_j;

  double nlos_br = 0.0;                    // NLOS std of the BS->surface link
  std::vector<double> nlos_jr;             // per q
};

StatContext make_stat_context(const CouplingModel& cm, const LinkStatsSet& stats);

// Closed-form matrices of the expectation-free problem, functions of the
// current reflection state.  c1 factors exactly as h_c^H h_c.
struct SurrogateMatrices {
  std::vector<CMat> c1;                    // per k, N x N
  std::vector<std::vector<CMat>> c2;       // [q][k], N_J x N_J
  std::vector<CMat> c3;                    // per k, M x M
  CMat c4;                                 // N x N
  std::vector<CMat> c5;                    // per q
  CMat c6;                                 // M x M
  std::vector<CMat> h_c;                   // per k, (2N+M) x N
  CVec gamma_tilde;                        // diag(Gamma_A) + 1 used for assembly
};

SurrogateMatrices build_surrogates(const ReflectionState& state, const CouplingModel& cm,
                                   const StatContext& ctx);
SurrogateMatrices build_surrogates(const ReflectionState& state, const CouplingModel& cm,
                                   const LinkStatsSet& stats);

// Upper-bound ergodic sum rate sum_k log2(1 + gamma_k) with the surrogate
// SINRs; optionally returns them.
double ergodic_rate_bound(const std::vector<CVec>& w, const SurrogateMatrices& sm,
                          const JammerStrategy& jam, const NoiseParams& noise,
                          RVec* sinr_out = nullptr);

// Expected amplification power of the surface output.
double amplification_power(const std::vector<CVec>& w, const SurrogateMatrices& sm,
                           const JammerStrategy& jam, double sigma_r2);

// Exact per-realization SINRs and sum rate.
struct RateSample {
  RVec sinr;
  double rate = 0.0;
};
RateSample exact_rate_sample(const EffectiveChannels& eff, const std::vector<CVec>& w,
                             const JammerStrategy& jam, const NoiseParams& noise);

// Exact per-realization surface output power (the quantity the amplification
// budget constrains, evaluated on one channel draw).
double exact_output_power(const EffectiveChannels& eff, const std::vector<CVec>& w,
                          const JammerStrategy& jam, double sigma_r2);

}  // namespace emcris
