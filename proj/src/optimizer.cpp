// SPDX-License-Identifier: Apache-2.0
#include "emcris/optimizer.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <memory>

#include "emcris/linalg.hpp"
#include "emcris/qcqp.hpp"
#include "emcris/rng.hpp"

namespace emcris {
namespace {

constexpr double kTiny = 1e-300;

double jbar_value(int k, const SurrogateMatrices& sm, const JammerStrategy& jam,
                  const NoiseParams& noise) {
  double v = 0.0;
  for (int q = 0; q < jam.num_jammers(); ++q) {
    v += (jam.w[q][k].adjoint() * sm.c2[q][k] * jam.w[q][k])(0).real();
  }
  v += noise.sigma_r2 * sm.c3[k].trace().real();
  return v;
}

// gamma~ = diag(view_d) * x + view_c for the current block variable.
CVec apply_view(const CVec& d, const CVec& c, const CVec& x) {
  return d.cwiseProduct(x) + c;
}

// Objective linear term with the norm surrogates linearized at gamma0.
CVec tangent_linear_term(const GammaQuadratics& gq, const StatContext& ctx,
                         const CVec& gamma0) {
  CVec t = gq.t;
  for (int k = 0; k < static_cast<int>(ctx.sigma_ru_tilde.size()); ++k) {
    if (gq.ell_coef(k) <= 0.0) continue;
    const CVec sg = ctx.sigma_ru_tilde[k] * gamma0;
    const double ell0 = std::sqrt(std::max(0.0, (gamma0.adjoint() * sg)(0).real()));
    if (ell0 < 1e-150) continue;  // subgradient 0 at the norm's kink
    t += (gq.ell_coef(k) / ell0) * sg;
  }
  return t;
}

struct AdmmScale {
  double primal = 0.0;
  double dual = 0.0;
};

}  // namespace

ReflectionState AoState::reflection(double l_ps) const {
  ReflectionState st;
  st.alpha = (lambda_bar.array() - 1.0).cwiseMax(0.0);
  st.theta = theta;
  st.l_ps = l_ps;
  return st;
}

double AoState::bs_power() const {
  double p = 0.0;
  for (const auto& wk : w) p += wk.squaredNorm();
  return p;
}

void update_auxiliaries(AoState& st, const SurrogateMatrices& sm, const JammerStrategy& jam,
                        const NoiseParams& noise) {
  const int k_total = static_cast<int>(sm.c1.size());
  st.omega = RVec::Zero(k_total);
  st.nu.assign(k_total, CVec());
  for (int k = 0; k < k_total; ++k) {
    double den = jbar_value(k, sm, jam, noise) + noise.sigma_k2;
    CVec own = sm.h_c[k] * st.w[k];
    for (int j = 0; j < k_total; ++j) den += (sm.h_c[k] * st.w[j]).squaredNorm();
    const double sig = own.squaredNorm();
    const double interf = den - sig;
    st.omega(k) = (sig > 0.0 && interf > 0.0) ? sig / interf : 0.0;
    st.nu[k] = (den > 0.0) ? CVec(std::sqrt(1.0 + st.omega(k)) / den * own)
                           : CVec(CVec::Zero(own.size()));
  }
}

double f_of_value(const std::vector<CVec>& w, const AoState& st, const SurrogateMatrices& sm,
                  const JammerStrategy& jam, const NoiseParams& noise) {
  const int k_total = static_cast<int>(sm.c1.size());
  double f = 0.0;
  for (int k = 0; k < k_total; ++k) {
    double den = jbar_value(k, sm, jam, noise) + noise.sigma_k2;
    for (int j = 0; j < k_total; ++j) den += (sm.h_c[k] * w[j]).squaredNorm();
    const double align = (st.nu[k].adjoint() * sm.h_c[k] * w[k])(0).real();
    f += std::log1p(st.omega(k)) - st.omega(k) +
         2.0 * std::sqrt(1.0 + st.omega(k)) * align - st.nu[k].squaredNorm() * den;
  }
  return f;
}

GammaQuadratics assemble_gamma_quadratics(const std::vector<CVec>& w, const AoState& st,
                                          const CouplingModel& cm, const StatContext& ctx,
                                          const JammerStrategy& jam, const NoiseParams& noise,
                                          double p_a_max) {
  const int m = ctx.m;
  const int k_total = ctx.k;
  const double b4 = 1.0 / (4.0 * ctx.z0);

  GammaQuadratics gq;
  gq.y = CMat::Zero(m, m);
  gq.t = CVec::Zero(m);
  gq.ell_coef = RVec::Zero(k_total);
  gq.y_pow = CMat::Zero(m, m);
  gq.p_a_max = p_a_max;

  std::vector<CVec> g(k_total);           // mu~_BR w_j
  std::vector<RVec> psi_norm2_vec;        // ||psi_j||^2 per j
  RVec psi2(k_total);
  for (int j = 0; j < k_total; ++j) {
    g[j] = ctx.mu_br_tilde * w[j];
    psi2(j) = std::pow(ctx.nlos_br * b4, 2) * (ctx.sigma_b_sqrt * w[j]).squaredNorm();
  }
  const double psi2_sum = psi2.sum();

  std::vector<std::vector<CVec>> e(ctx.q);    // mu~_JR,q w_J[q][k]
  std::vector<RVec> chi2(ctx.q);              // ||chi_qk||^2
  double chi2_total = 0.0;
  for (int q = 0; q < ctx.q; ++q) {
    chi2[q] = RVec(k_total);
    for (int k = 0; k < k_total; ++k) {
      e[q].push_back(ctx.mu_jr_tilde[q] * jam.w[q][k]);
      chi2[q](k) =
          std::pow(ctx.nlos_jr[q] * b4, 2) * (ctx.sigma_j_sqrt[q] * jam.w[q][k]).squaredNorm();
      chi2_total += chi2[q](k);
    }
  }

  double constant = 0.0;
  double p_const = ctx.tr_r_aa_plus / (4.0 * ctx.z0 * ctx.z0) * noise.sigma_r2;

  for (int k = 0; k < k_total; ++k) {
    const double nu2 = st.nu[k].squaredNorm();
    const CVec nu1 = st.nu[k].head(ctx.n);
    const CVec nuv = st.nu[k].segment(ctx.n, m);
    const CVec nu3 = st.nu[k].tail(ctx.n);
    const double root = std::sqrt(1.0 + st.omega(k));

    // quadratic pieces of sum_j ||H_C w_j||^2 and Jbar_k
    CMat yk = CMat::Zero(m, m);
    double ell2_weight = psi2_sum;
    for (int j = 0; j < k_total; ++j) {
      yk += b4 * b4 * ctx.r_ru_tilde[k].cwiseProduct(g[j].conjugate() * g[j].transpose());
    }
    for (int q = 0; q < ctx.q; ++q) {
      yk += b4 * b4 *
            ctx.r_ru_tilde[k].cwiseProduct(e[q][k].conjugate() * e[q][k].transpose());
      ell2_weight += chi2[q](k);
    }
    yk += ell2_weight * ctx.sigma_ru_tilde[k];
    yk += noise.sigma_r2 * ctx.sigma_c3[k];
    gq.y += nu2 * yk;

    // linear piece from Re{nu_k2^H B_kk gamma}
    gq.t += 2.0 * root * b4 * g[k].conjugate().cwiseProduct(ctx.r_ru_tilde_sqrt[k] * nuv);

    // norm-term coefficient (non-negative at the stationary auxiliaries)
    const double psi_align =
        (ctx.nlos_br * b4) * (nu3.adjoint() * ctx.sigma_b_sqrt * w[k])(0).real();
    gq.ell_coef(k) = std::max(0.0, 2.0 * root * psi_align);

    // gamma-independent parts
    double den_const = noise.sigma_k2 + noise.sigma_r2 * ctx.r_ru[k].trace().real();
    for (int j = 0; j < k_total; ++j) {
      den_const += (w[j].adjoint() * ctx.r_bu[k] * w[j])(0).real();
    }
    for (int q = 0; q < ctx.q; ++q) {
      den_const += (jam.w[q][k].adjoint() * ctx.r_ju[q][k] * jam.w[q][k])(0).real();
    }
    constant += std::log1p(st.omega(k)) - st.omega(k) +
                2.0 * root * (nu1.adjoint() * ctx.r_bu_sqrt[k] * w[k])(0).real() -
                nu2 * den_const;

    // power quadratics fed by the BS streams
    gq.y_pow += b4 * b4 * ctx.gram_z_tilde.cwiseProduct(g[k].conjugate() * g[k].transpose());
    p_const += (w[k].adjoint() * ctx.r_br * w[k])(0).real();
  }

  for (int q = 0; q < ctx.q; ++q) {
    for (int k = 0; k < k_total; ++k) {
      gq.y_pow +=
          b4 * b4 * ctx.gram_z_tilde.cwiseProduct(e[q][k].conjugate() * e[q][k].transpose());
      p_const += (jam.w[q][k].adjoint() * ctx.r_jr[q] * jam.w[q][k])(0).real();
    }
  }
  gq.y_pow += (psi2_sum + chi2_total) * ctx.sigma_bar_a;
  gq.y_pow += noise.sigma_r2 * ctx.sigma_hat_a;

  gq.y = hermitize(gq.y);
  gq.y_pow = hermitize(gq.y_pow);
  gq.constant = constant;
  gq.p_const = p_const;
  return gq;
}

double evaluate_gamma_objective(const GammaQuadratics& gq, const StatContext& ctx,
                                const CVec& gamma_tilde) {
  double v = gq.constant + (gq.t.adjoint() * gamma_tilde)(0).real() -
             (gamma_tilde.adjoint() * gq.y * gamma_tilde)(0).real();
  for (int k = 0; k < static_cast<int>(ctx.sigma_ru_tilde.size()); ++k) {
    if (gq.ell_coef(k) == 0.0) continue;
    const double ell2 =
        std::max(0.0, (gamma_tilde.adjoint() * ctx.sigma_ru_tilde[k] * gamma_tilde)(0).real());
    v += gq.ell_coef(k) * std::sqrt(ell2);
  }
  return v;
}

double evaluate_gamma_power(const GammaQuadratics& gq, const CVec& gamma_tilde) {
  return gq.p_const + (gamma_tilde.adjoint() * gq.y_pow * gamma_tilde)(0).real();
}

std::vector<CVec> admm_beamforming(const AoState& st, const SurrogateMatrices& sm,
                                   const OptimizationProblem& prob, const SolverOptions& opts) {
  const int k_total = static_cast<int>(sm.c1.size());
  const int n = static_cast<int>(st.w[0].size());
  const int dim = k_total * n;

  double pbar = std::numeric_limits<double>::infinity();
  if (std::isfinite(prob.p_a_max)) {
    pbar = prob.p_a_max;
    for (int q = 0; q < prob.jam.num_jammers(); ++q) {
      for (int k = 0; k < k_total; ++k) {
        pbar -= (prob.jam.w[q][k].adjoint() * sm.c5[q] * prob.jam.w[q][k])(0).real();
      }
    }
    pbar -= prob.noise.sigma_r2 * sm.c6.trace().real();
    if (!(pbar > 0.0)) {
      throw InfeasibleError("amplification budget exhausted by jamming and noise");
    }
  }

  // zeta_k = 2 sqrt(1+omega_k) H_C,k^H nu_k; shared quadratic S = sum ||nu||^2 C1.
  CVec zeta = CVec::Zero(dim);
  CMat s_block = CMat::Zero(n, n);
  for (int k = 0; k < k_total; ++k) {
    zeta.segment(k * n, n) =
        2.0 * std::sqrt(1.0 + st.omega(k)) * (sm.h_c[k].adjoint() * st.nu[k]);
    s_block += st.nu[k].squaredNorm() * sm.c1[k];
  }
  std::vector<CVec> out(k_total, CVec::Zero(n));
  if (zeta.norm() < kTiny) return out;

  CMat ups1 = CMat::Zero(dim, dim);
  CMat ups2 = CMat::Zero(dim, dim);
  for (int k = 0; k < k_total; ++k) {
    ups1.block(k * n, k * n, n, n) = s_block;
    ups2.block(k * n, k * n, n, n) = sm.c4;
  }
  const CMat eye = CMat::Identity(dim, dim);

  // Ball-only fast path: optimal whenever it already meets the power budget.
  const double ridge = 1e-12 * (s_block.trace().real() / n + kTiny);
  const auto ball = solve_qcqp_single<Complex>(CMat(ups1 + ridge * eye), CVec(0.5 * zeta),
                                               eye, prob.p_max, opts.bisect_rel_tol);
  const double ball_pow = (ball.x.adjoint() * ups2 * ball.x)(0).real();
  auto unstack = [&](const CVec& x) {
    std::vector<CVec> w(k_total);
    for (int k = 0; k < k_total; ++k) w[k] = x.segment(k * n, n);
    return w;
  };
  if (!std::isfinite(pbar) || ball_pow <= pbar) return unstack(ball.x);

  double rho = opts.rho_w;
  auto make_x_solver = [&](double r) {
    return PrefactoredQcqp<Complex>(CMat(ups1 + (r / 2.0 + ridge) * eye), eye);
  };
  PrefactoredQcqp<Complex> x_solver = make_x_solver(rho);
  const PrefactoredQcqp<Complex> c_solver(eye, ups2);

  CVec w_x = ball.x * std::sqrt(std::min(1.0, pbar / ball_pow));
  CVec w_c = w_x;
  CVec lambda = CVec::Zero(dim);
  const double scale = std::sqrt(prob.p_max);

  for (int it = 0; it < opts.i1_max; ++it) {
    const CVec w_prev_c = w_c;
    w_x = x_solver.solve(CVec(0.5 * (zeta + rho * w_c - lambda)), prob.p_max,
                         opts.bisect_rel_tol)
              .x;
    w_c = c_solver.solve(CVec(w_x + lambda / rho), pbar, opts.bisect_rel_tol).x;
    lambda += rho * (w_x - w_c);

    const double r_primal = (w_x - w_c).norm();
    const double r_dual = rho * (w_c - w_prev_c).norm();
    const double ref = std::max({w_x.norm(), w_c.norm(), 1e-3 * scale});
    if (r_primal <= opts.admm_tol * ref && r_dual <= opts.admm_tol * ref) break;
    if (opts.self_tune_rho && (it + 1) % 8 == 0) {
      if (r_primal > 10.0 * r_dual) {
        rho *= 2.0;
        x_solver = make_x_solver(rho);
      } else if (r_dual > 10.0 * r_primal) {
        rho *= 0.5;
        x_solver = make_x_solver(rho);
      }
    }
  }

  // Return the transmit-feasible iterate, shrunk onto the power ellipsoid if
  // consensus left a small gap (both sets are centered, scaling is safe).
  const double pow_val = (w_x.adjoint() * ups2 * w_x)(0).real();
  if (pow_val > pbar) w_x *= std::sqrt(pbar / pow_val) * (1.0 - 1e-12);
  return unstack(w_x);
}

AmplitudeProblem build_amplitude_problem(const GammaQuadratics& gq, const StatContext& ctx,
                                         const AoState& st, double l_ps, double gamma_max) {
  const int m = ctx.m;
  const double l2 = l_ps * l_ps;
  AmplitudeProblem ap;
  ap.view_d = CVec(m);
  ap.view_c = CVec(m);
  for (int i = 0; i < m; ++i) {
    const Complex phase = std::exp(kJ * (2.0 * st.theta(i)));
    ap.view_d(i) = l2 * phase;
    ap.view_c(i) = Complex(1.0, 0.0) - l2 * phase;
  }
  const CVec gamma0 = apply_view(ap.view_d, ap.view_c, st.lambda_bar.cast<Complex>());
  const CVec t_eff = tangent_linear_term(gq, ctx, gamma0);

  const auto d = ap.view_d.asDiagonal();
  ap.y = (d.toDenseMatrix().adjoint() * gq.y * d).real();
  ap.y = 0.5 * (ap.y + ap.y.transpose()).eval();
  ap.t = (ap.view_d.conjugate().cwiseProduct(t_eff) -
          2.0 * d.toDenseMatrix().adjoint() * (gq.y * ap.view_c))
             .real();
  ap.box_lo = 1.0;
  ap.box_hi = gamma_max + 1.0;

  if (gq.power_constrained()) {
    ap.y_pow = (d.toDenseMatrix().adjoint() * gq.y_pow * d).real();
    ap.y_pow = 0.5 * (ap.y_pow + ap.y_pow.transpose()).eval();
    ap.h_pow = (d.toDenseMatrix().adjoint() * (gq.y_pow * ap.view_c)).real();
    ap.p_budget = gq.p_a_max - gq.p_const -
                  (ap.view_c.adjoint() * gq.y_pow * ap.view_c)(0).real();
  }
  return ap;
}

RVec admm_amplitude(const AmplitudeProblem& ap, const RVec& x0, const SolverOptions& opts) {
  const int m = static_cast<int>(x0.size());
  const bool constrained = ap.y_pow.size() > 0;
  const RMat eye = RMat::Identity(m, m);

  RVec shift = RVec::Zero(m);
  double p_shifted = ap.p_budget;
  if (constrained) {
    Eigen::LLT<RMat> llt(ap.y_pow + 1e-12 * ap.y_pow.trace() / m * eye);
    if (llt.info() != Eigen::Success) throw ModelError("power quadratic not PD");
    shift = llt.solve(ap.h_pow);
    p_shifted = ap.p_budget + ap.h_pow.dot(shift);
    if (!(p_shifted > 0.0)) throw InfeasibleError("amplification budget infeasible");
  }

  double rho = opts.rho_lam;
  const double ridge = 1e-12 * (ap.y.trace() / m + kTiny);
  RVec x = x0, x_c = x0, lambda = RVec::Zero(m);

  auto make_solver = [&](double r) {
    return PrefactoredQcqp<double>(RMat(ap.y + (r / 2.0 + ridge) * eye), ap.y_pow);
  };
  std::unique_ptr<PrefactoredQcqp<double>> solver;
  std::unique_ptr<Eigen::LLT<RMat>> free_solver;
  if (constrained) {
    solver = std::make_unique<PrefactoredQcqp<double>>(make_solver(rho));
  } else {
    free_solver = std::make_unique<Eigen::LLT<RMat>>(RMat(ap.y + (rho / 2.0 + ridge) * eye));
  }

  const double scale = std::sqrt(static_cast<double>(m));
  for (int it = 0; it < opts.i2_max; ++it) {
    const RVec x_c_prev = x_c;
    const RVec t_prime = 0.5 * (ap.t + rho * x_c - lambda);
    if (constrained) {
      const RMat k1 = ap.y + (rho / 2.0 + ridge) * eye;
      const RVec k_shift = k1 * shift + t_prime;
      x = solver->solve(k_shift, p_shifted, opts.bisect_rel_tol).x - shift;
    } else {
      x = free_solver->solve(t_prime);
    }
    x_c = (x + lambda / rho).cwiseMax(ap.box_lo).cwiseMin(ap.box_hi);
    lambda += rho * (x - x_c);

    const double r_primal = (x - x_c).norm();
    const double r_dual = rho * (x_c - x_c_prev).norm();
    const double ref = std::max({x.norm(), x_c.norm(), 1e-3 * scale});
    if (r_primal <= opts.admm_tol * ref && r_dual <= opts.admm_tol * ref) break;
    if (opts.self_tune_rho && (it + 1) % 8 == 0) {
      if (r_primal > 10.0 * r_dual) {
        rho *= 2.0;
      } else if (r_dual > 10.0 * r_primal) {
        rho *= 0.5;
      } else {
        continue;
      }
      if (constrained) {
        solver = std::make_unique<PrefactoredQcqp<double>>(make_solver(rho));
      } else {
        free_solver =
            std::make_unique<Eigen::LLT<RMat>>(RMat(ap.y + (rho / 2.0 + ridge) * eye));
      }
    }
  }
  return x;
}

PhaseProblem build_phase_problem(const GammaQuadratics& gq, const StatContext& ctx,
                                 const AoState& st, double l_ps) {
  const int m = ctx.m;
  const double l2 = l_ps * l_ps;
  PhaseProblem pp;
  pp.view_d = CVec(m);
  pp.view_c = CVec::Ones(m);
  for (int i = 0; i < m; ++i) pp.view_d(i) = l2 * std::max(0.0, st.lambda_bar(i) - 1.0);

  CVec phi0(m);
  for (int i = 0; i < m; ++i) phi0(i) = std::exp(kJ * (2.0 * st.theta(i)));
  const CVec gamma0 = apply_view(pp.view_d, pp.view_c, phi0);
  const CVec t_eff = tangent_linear_term(gq, ctx, gamma0);

  const auto d = pp.view_d.asDiagonal();
  pp.y = hermitize(d.toDenseMatrix().adjoint() * gq.y * d);
  pp.t = pp.view_d.conjugate().cwiseProduct(t_eff) -
         2.0 * d.toDenseMatrix().adjoint() * (gq.y * pp.view_c);

  if (gq.power_constrained()) {
    pp.y_pow = hermitize(d.toDenseMatrix().adjoint() * gq.y_pow * d);
    pp.h_pow = d.toDenseMatrix().adjoint() * (gq.y_pow * pp.view_c);
    pp.p_fixed = gq.p_const + (pp.view_c.adjoint() * gq.y_pow * pp.view_c)(0).real();
    pp.p_budget = gq.p_a_max;
  }
  return pp;
}

namespace {

double phase_objective(const CMat& y, const CVec& t, const CVec& phi) {
  return (phi.adjoint() * y * phi)(0).real() - (t.adjoint() * phi)(0).real();
}

// One coordinate pass; returns true when any element moved.  When y_pow is
// non-empty every move must keep the amplification budget.
bool sweep_pass(const CMat& y, const CVec& t, const RVec& grid, CVec& phi, RVec& theta,
                const CMat* y_pow, const CVec* h_pow, double p_fixed, double p_budget,
                CVec* u_pow, double* p_val) {
  const int m = static_cast<int>(phi.size());
  bool changed = false;
  for (int i = 0; i < m; ++i) {
    const Complex v = (y.row(i) * phi)(0) - y(i, i) * phi(i);
    const Complex tbar = t(i) - 2.0 * v;
    double best_val = -std::numeric_limits<double>::infinity();
    int best_idx = -1;
    Complex best_phi;
    for (int g = 0; g < grid.size(); ++g) {
      const Complex cand = std::exp(kJ * (2.0 * grid(g)));
      const double val = (std::conj(cand) * tbar).real();
      if (val > best_val + 1e-15 * std::abs(best_val)) {
        if (y_pow) {
          const Complex delta = cand - phi(i);
          const double dp = 2.0 * (std::conj(delta) * ((*h_pow)(i) + (*u_pow)(i))).real() +
                            (*y_pow)(i, i).real() * std::norm(delta);
          if (*p_val + dp > p_budget * (1.0 + 1e-12) + 1e-30) continue;
        }
        best_val = val;
        best_idx = g;
        best_phi = cand;
      }
    }
    if (best_idx >= 0 && std::abs(best_phi - phi(i)) > 1e-14) {
      if (y_pow) {
        const Complex delta = best_phi - phi(i);
        const double dp = 2.0 * (std::conj(delta) * ((*h_pow)(i) + (*u_pow)(i))).real() +
                          (*y_pow)(i, i).real() * std::norm(delta);
        *p_val += dp;
        *u_pow += y_pow->col(i) * delta;
        (void)p_fixed;
      }
      phi(i) = best_phi;
      theta(i) = grid(best_idx);
      changed = true;
    }
  }
  return changed;
}

RVec run_sweep(const CMat& y, const CVec& t, int bits, const SolverOptions& opts,
               const RVec& theta_init, const CMat* y_pow, const CVec* h_pow, double p_fixed,
               double p_budget) {
  const RVec grid = phase_set(bits);
  const int m = static_cast<int>(theta_init.size());

  std::vector<RVec> starts{theta_init};
  const int restarts = std::min(opts.phase_restarts, static_cast<int>(grid.size()));
  for (int r = 0; r < restarts; ++r) {
    const int idx = r * static_cast<int>(grid.size()) / std::max(1, restarts);
    starts.push_back(RVec::Constant(m, grid(idx)));
  }

  double best_obj = std::numeric_limits<double>::infinity();
  RVec best_theta = theta_init;
  for (const RVec& start : starts) {
    RVec theta = start;
    CVec phi(m);
    for (int i = 0; i < m; ++i) phi(i) = std::exp(kJ * (2.0 * theta(i)));

    CVec u_pow;
    double p_val = 0.0;
    if (y_pow) {
      u_pow = (*y_pow) * phi;
      p_val = p_fixed + 2.0 * (h_pow->adjoint() * phi)(0).real() +
              (phi.adjoint() * u_pow)(0).real();
      if (p_val > p_budget * (1.0 + 1e-9)) continue;  // infeasible start
    }
    for (int pass = 0; pass < opts.i3_max; ++pass) {
      if (!sweep_pass(y, t, grid, phi, theta, y_pow, h_pow, p_fixed, p_budget, &u_pow,
                      &p_val)) {
        break;
      }
    }
    const double obj = phase_objective(y, t, phi);
    if (obj < best_obj - 1e-15 * std::abs(best_obj)) {
      best_obj = obj;
      best_theta = theta;
    }
  }
  return best_theta;
}

}  // namespace

RVec discrete_phase_sweep(const CMat& y, const CVec& t, int bits, const SolverOptions& opts,
                          const RVec& theta_init) {
  return run_sweep(y, t, bits, opts, theta_init, nullptr, nullptr, 0.0, 0.0);
}

RVec discrete_phase_sweep_guarded(const PhaseProblem& pp, int bits, const SolverOptions& opts,
                                  const RVec& theta_init) {
  if (pp.y_pow.size() == 0) {
    return discrete_phase_sweep(pp.y, pp.t, bits, opts, theta_init);
  }
  return run_sweep(pp.y, pp.t, bits, opts, theta_init, &pp.y_pow, &pp.h_pow, pp.p_fixed,
                   pp.p_budget);
}

namespace {

struct BlockGuard {
  // f_OF at fixed auxiliaries, rebuilt for candidate reflection states.
  static double value(const std::vector<CVec>& w, const AoState& st,
                      const ReflectionState& rs, const OptimizationProblem& prob) {
    const auto sm = build_surrogates(rs, prob.cm, prob.ctx);
    return f_of_value(w, st, sm, prob.jam, prob.noise);
  }
};

// Largest uniform amplitude (grid-refined) keeping the output power feasible.
double feasible_uniform_alpha(const std::vector<CVec>& w, AoState st,
                              const OptimizationProblem& prob, const SolverOptions& opts) {
  if (!std::isfinite(prob.p_a_max)) return prob.gamma_max;
  const int grid_n = 33;
  double best = -1.0;
  for (int i = grid_n - 1; i >= 0; --i) {
    const double u = prob.gamma_max * i / (grid_n - 1);
    st.lambda_bar = RVec::Constant(prob.ctx.m, 1.0 + u);
    const auto sm = build_surrogates(st.reflection(prob.l_ps), prob.cm, prob.ctx);
    if (amplification_power(w, sm, prob.jam, prob.noise.sigma_r2) <=
        prob.p_a_max * (1.0 - 1e-9)) {
      best = u;
      break;
    }
  }
  (void)opts;
  return best;
}

}  // namespace

AoResult da_ao_solve(const OptimizationProblem& prob, const SolverOptions& opts) {
  const StatContext& ctx = prob.ctx;
  const int m = ctx.m;
  const int k_total = ctx.k;

  AoState st;
  st.theta = RVec::Zero(m);
  st.lambda_bar = RVec::Ones(m);
  st.w.resize(k_total);

  RngStream init_rng(opts.init_perturb_seed);
  for (int k = 0; k < k_total; ++k) {
    CVec dir;
    if (opts.init_perturb_seed != 0) {
      dir = init_rng.cgaussian(ctx.n, 1).col(0);
    } else {
      Eigen::SelfAdjointEigenSolver<CMat> es(ctx.r_bu[k]);
      dir = es.eigenvectors().col(ctx.n - 1);  // matched to the direct-link statistics
    }
    st.w[k] = std::sqrt(prob.p_max / k_total) * dir / dir.norm();
  }
  if (opts.init_theta.size() == m) {
    for (int i = 0; i < m; ++i) st.theta(i) = snap_to_phase_set(opts.init_theta(i), prob.phase_bits);
  } else if (opts.init_perturb_seed != 0) {
    const RVec grid = phase_set(prob.phase_bits);
    for (int i = 0; i < m; ++i) {
      st.theta(i) = grid(static_cast<int>(init_rng.uniform(0.0, grid.size())) %
                         static_cast<int>(grid.size()));
    }
  }

  // Feasible start: shrink the transmit vector until some uniform amplitude
  // fits the amplification budget.
  if (std::isfinite(prob.p_a_max)) {
    bool feasible = false;
    for (int halvings = 0; halvings <= 40; ++halvings) {
      const double u = feasible_uniform_alpha(st.w, st, prob, opts);
      if (u >= 0.0) {
        st.lambda_bar = RVec::Constant(m, 1.0 + u);
        feasible = true;
        break;
      }
      for (auto& wk : st.w) wk *= 0.5;
    }
    if (!feasible) {
      throw InfeasibleError("amplification budget exhausted by jamming and noise");
    }
  } else {
    // unconstrained output power: a pinned amplitude sits exactly at the cap
    const double alpha0 = opts.fix_amplitude ? prob.gamma_max : std::min(1.0, prob.gamma_max);
    st.lambda_bar = RVec::Constant(m, 1.0 + alpha0);
  }

  auto sm = build_surrogates(st.reflection(prob.l_ps), prob.cm, ctx);
  update_auxiliaries(st, sm, prob.jam, prob.noise);

  AoResult result;
  const double ln2 = std::log(2.0);
  auto record = [&](int iter) {
    IterationRecord rec;
    rec.iter = iter;
    rec.f_of = 0.0;
    for (int k = 0; k < k_total; ++k) rec.f_of += std::log1p(st.omega(k));
    rec.rate_bound = rec.f_of / ln2;
    rec.pmax_slack = prob.p_max - st.bs_power();
    rec.pa_slack = std::isfinite(prob.p_a_max)
                       ? prob.p_a_max -
                             amplification_power(st.w, sm, prob.jam, prob.noise.sigma_r2)
                       : std::numeric_limits<double>::infinity();
    result.trace.push_back(rec);
    return rec.f_of;
  };

  double f_prev = record(0);
  int iter = 0;
  for (iter = 1; iter <= opts.i_max; ++iter) {
    // transmit beamforming
    {
      const double f_old = f_of_value(st.w, st, sm, prob.jam, prob.noise);
      auto w_cand = admm_beamforming(st, sm, prob, opts);
      if (f_of_value(w_cand, st, sm, prob.jam, prob.noise) >= f_old) st.w = std::move(w_cand);
    }

    const auto gq = assemble_gamma_quadratics(st.w, st, prob.cm, ctx, prob.jam, prob.noise,
                                              prob.p_a_max);

    // amplitude block
    if (!opts.fix_amplitude) {
      const auto ap = build_amplitude_problem(gq, ctx, st, prob.l_ps, prob.gamma_max);
      RVec cand;
      try {
        cand = admm_amplitude(ap, st.lambda_bar, opts)
                   .cwiseMax(ap.box_lo)
                   .cwiseMin(ap.box_hi);
      } catch (const InfeasibleError&) {
        cand = st.lambda_bar;
      }
      if (gq.power_constrained()) {
        // blend toward the (feasible) current iterate if the clamp overshot
        CVec gamma_cand =
            apply_view(ap.view_d, ap.view_c, cand.cast<Complex>());
        for (int guard = 0;
             guard < 60 && evaluate_gamma_power(gq, gamma_cand) > prob.p_a_max * (1 + 1e-9);
             ++guard) {
          cand = 0.5 * (cand + st.lambda_bar);
          gamma_cand = apply_view(ap.view_d, ap.view_c, cand.cast<Complex>());
        }
        if (evaluate_gamma_power(gq, gamma_cand) > prob.p_a_max * (1 + 1e-9)) {
          cand = st.lambda_bar;
        }
      }
      AoState trial = st;
      trial.lambda_bar = cand;
      const double f_old = BlockGuard::value(st.w, st, st.reflection(prob.l_ps), prob);
      if (BlockGuard::value(st.w, st, trial.reflection(prob.l_ps), prob) >= f_old) {
        st.lambda_bar = std::move(cand);
      }
    }

    // discrete phases
    if (!opts.fix_theta) {
      const auto pp = build_phase_problem(gq, ctx, st, prob.l_ps);
      RVec theta_cand = discrete_phase_sweep_guarded(pp, prob.phase_bits, opts, st.theta);
      AoState trial = st;
      trial.theta = theta_cand;
      const double f_old = BlockGuard::value(st.w, st, st.reflection(prob.l_ps), prob);
      if (BlockGuard::value(st.w, st, trial.reflection(prob.l_ps), prob) >= f_old) {
        st.theta = std::move(theta_cand);
      }
    }

    sm = build_surrogates(st.reflection(prob.l_ps), prob.cm, ctx);
    update_auxiliaries(st, sm, prob.jam, prob.noise);
    const double f_now = record(iter);
    if (std::abs(f_now - f_prev) < opts.eta) {
      f_prev = f_now;
      result.converged = true;
      break;
    }
    f_prev = f_now;
  }

  result.outer_iters = std::min(iter, opts.i_max);
  result.rate_bound = f_prev / ln2;
  result.pmax_slack = prob.p_max - st.bs_power();
  result.pa_slack = std::isfinite(prob.p_a_max)
                        ? prob.p_a_max -
                              amplification_power(st.w, sm, prob.jam, prob.noise.sigma_r2)
                        : std::numeric_limits<double>::infinity();
  result.state = std::move(st);
  return result;
}

}  // namespace emcris
