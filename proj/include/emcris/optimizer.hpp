// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "emcris/statistics.hpp"
#include "emcris/types.hpp"

namespace emcris {

struct SolverOptions {
  double eta = 1e-3;        // outer stopping tolerance on f_OF
  int i_max = 200;          // outer iterations
  int i1_max = 200;         // beamforming ADMM iterations
  int i2_max = 200;         // amplitude ADMM iterations
  int i3_max = 50;          // phase sweep passes
  double rho_w = 1.0;
  double rho_lam = 1.0;
  bool self_tune_rho = true;   // x2 / /2 residual balancing
  double admm_tol = 1e-6;      // relative residual exit
  double bisect_rel_tol = 1e-9;
  int phase_restarts = 4;      // uniform-phase restarts of the sweep
  bool fix_theta = false;      // keep phases at their initial values
  bool fix_amplitude = false;  // keep amplitudes at their initial values
  std::uint64_t init_perturb_seed = 0;  // 0 = deterministic default start
  RVec init_theta;             // optional initial phases (empty = zeros)
};

// The scenario as the solver sees it.  p_a_max may be infinity (no
// amplification constraint, passive baseline).
struct OptimizationProblem {
  CouplingModel cm;
  StatContext ctx;
  JammerStrategy jam;
  NoiseParams noise;
  double p_max = 1.0;
  double p_a_max = std::numeric_limits<double>::infinity();
  double gamma_max = 1.0;
  int phase_bits = 3;
  double l_ps = 1.0;
};

// All block-coordinate iterates of one solve.
struct AoState {
  std::vector<CVec> w;   // per UE, length N
  RVec lambda_bar;       // alpha + 1, in [1, gamma_max + 1]
  RVec theta;            // on the 2^bits grid
  RVec omega;            // per UE, >= 0
  std::vector<CVec> nu;  // per UE, length 2N + M

  ReflectionState reflection(double l_ps) const;
  double bs_power() const;
};

struct IterationRecord {
  int iter = 0;
  double f_of = 0.0;        // nats
  double rate_bound = 0.0;  // bits, f_of / ln 2
  double pa_slack = 0.0;
  double pmax_slack = 0.0;
};

struct AoResult {
  AoState state;
  std::vector<IterationRecord> trace;
  double rate_bound = 0.0;
  int outer_iters = 0;
  bool converged = false;
  double pa_slack = 0.0;
  double pmax_slack = 0.0;
};

// Closed-form auxiliary update of the transformed objective: omega_k is the
// surrogate SINR and nu_k the normalized matched filter of H_C,k w_k.
void update_auxiliaries(AoState& st, const SurrogateMatrices& sm, const JammerStrategy& jam,
                        const NoiseParams& noise);

// Transformed objective at the current iterates (nats).
double f_of_value(const std::vector<CVec>& w, const AoState& st, const SurrogateMatrices& sm,
                  const JammerStrategy& jam, const NoiseParams& noise);

// Everything quadratic in the decoupled reflection response gamma~ = diag of
// (Gamma_A + I): objective  const + Re{t^H g} + sum_k ell_coef_k * ell_k(g)
// - g^H y g  with ell_k(g) = sqrt(g^H Sigma~_RU,k g), and output power
// p_const + g^H y_pow g.
struct GammaQuadratics {
  CMat y;
  CVec t;
  RVec ell_coef;
  double constant = 0.0;
  CMat y_pow;
  double p_const = 0.0;
  double p_a_max = std::numeric_limits<double>::infinity();

  bool power_constrained() const { return std::isfinite(p_a_max); }
};

GammaQuadratics assemble_gamma_quadratics(const std::vector<CVec>& w, const AoState& st,
                                          const CouplingModel& cm, const StatContext& ctx,
                                          const JammerStrategy& jam, const NoiseParams& noise,
                                          double p_a_max);

double evaluate_gamma_objective(const GammaQuadratics& gq, const StatContext& ctx,
                                const CVec& gamma_tilde);
double evaluate_gamma_power(const GammaQuadratics& gq, const CVec& gamma_tilde);

// Consensus-ADMM beamforming under the transmit-power ball and the
// amplification-power ellipsoid.  Throws InfeasibleError when the residual
// amplification budget is non-positive.
std::vector<CVec> admm_beamforming(const AoState& st, const SurrogateMatrices& sm,
                                   const OptimizationProblem& prob, const SolverOptions& opts);

// Real quadratic program of the amplitude block: minimize x^T y x - t^T x over
// the box [1, gamma_max+1]^M intersected with x^T y_pow x + 2 h_pow^T x <= p_budget.
struct AmplitudeProblem {
  RMat y;
  RVec t;
  RMat y_pow;      // empty when unconstrained
  RVec h_pow;
  double p_budget = std::numeric_limits<double>::infinity();
  double box_lo = 1.0;
  double box_hi = 2.0;
  CVec view_d;     // gamma~ = diag(view_d) x + view_c
  CVec view_c;
};

// Linearizes the norm terms at the expansion point held in st (single
// re-expansion per outer iteration).
AmplitudeProblem build_amplitude_problem(const GammaQuadratics& gq, const StatContext& ctx,
                                         const AoState& st, double l_ps, double gamma_max);

RVec admm_amplitude(const AmplitudeProblem& ap, const RVec& x0, const SolverOptions& opts);

// Complex quadratic of the phase block over the unit-modulus discrete grid:
// minimize phi^H y phi - Re{t^H phi}.
struct PhaseProblem {
  CMat y;
  CVec t;
  CMat y_pow;      // power in phi: p_fixed + 2 Re{h_pow^H phi} + phi^H y_pow phi
  CVec h_pow;
  double p_fixed = 0.0;
  double p_budget = std::numeric_limits<double>::infinity();
  CVec view_d;     // gamma~ = diag(view_d) phi + view_c
  CVec view_c;
};

PhaseProblem build_phase_problem(const GammaQuadratics& gq, const StatContext& ctx,
                                 const AoState& st, double l_ps);

// Element-wise coordinate sweep over the discrete phase set, repeated until a
// fixed point; restarted from uniform grid phases, best fixed point returned.
RVec discrete_phase_sweep(const CMat& y, const CVec& t, int bits, const SolverOptions& opts,
                          const RVec& theta_init);

// Same sweep with the amplification budget enforced move-by-move.
RVec discrete_phase_sweep_guarded(const PhaseProblem& pp, int bits, const SolverOptions& opts,
                                  const RVec& theta_init);

// The full alternating solve.
AoResult da_ao_solve(const OptimizationProblem& prob, const SolverOptions& opts);

}  // namespace emcris
