// SPDX-License-Identifier: Apache-2.0
#include "emcris/statistics.hpp"

#include <cmath>

#include "emcris/linalg.hpp"

namespace emcris {
namespace {

// Second moment of a link in channel-operator units:
// (1/(2Z0)^2) (mu^H mu + s^2 tr_rx * Sigma_tx), tr_rx = Tr(Sigma_rx).
CMat link_second_moment(const LinkStats& st, double z0) {
  const double s2 = st.nlos_std * st.nlos_std;
  const double tr_rx = st.sigma_rx.trace().real();
  const double c = 1.0 / (4.0 * z0 * z0);
  return c * (st.mu.adjoint() * st.mu + s2 * tr_rx * st.sigma_tx);
}

CMat hadamard(const CMat& a, const CMat& b) { return a.cwiseProduct(b); }

}  // namespace

CMat gaussian_quadratic_expectation(const CMat& mu, const CMat& sigma1, const CMat& sigma2,
                                    const CMat& a) {
  if (mu.rows() != a.rows() || a.cols() != mu.rows() || sigma1.rows() != mu.rows() ||
      sigma2.rows() != mu.cols()) {
    throw ModelError("dimension mismatch in quadratic expectation");
  }
  return mu.adjoint() * a * mu + (a * sigma1).trace() * sigma2;
}

StatContext make_stat_context(const CouplingModel& cm, const LinkStatsSet& stats) {
  StatContext ctx;
  ctx.m = cm.size();
  ctx.n = static_cast<int>(stats.bs_ris.cols());
  ctx.n_j = stats.num_jammers() > 0 ? static_cast<int>(stats.jam_ris[0].cols()) : 0;
  ctx.k = stats.num_ues();
  ctx.q = stats.num_jammers();
  ctx.z0 = cm.z0();

  const RMat& b = cm.re_sqrt_inv();
  const CMat b_c = b.cast<Complex>();

  for (int k = 0; k < ctx.k; ++k) {
    ctx.r_bu.push_back(hermitize(link_second_moment(stats.bs_ue[k], ctx.z0)));
    ctx.r_ru.push_back(hermitize(link_second_moment(stats.ris_ue[k], ctx.z0)));
    ctx.r_bu_sqrt.push_back(herm_sqrt_psd(ctx.r_bu.back()));
  }
  ctx.r_ju.resize(ctx.q);
  for (int q = 0; q < ctx.q; ++q) {
    for (int k = 0; k < ctx.k; ++k) {
      ctx.r_ju[q].push_back(hermitize(link_second_moment(stats.jam_ue[q][k], ctx.z0)));
    }
  }
  ctx.r_br = hermitize(link_second_moment(stats.bs_ris, ctx.z0));
  for (int q = 0; q < ctx.q; ++q) {
    ctx.r_jr.push_back(hermitize(link_second_moment(stats.jam_ris[q], ctx.z0)));
  }

  const double c4z = 1.0 / std::pow(4.0 * ctx.z0, 2);
  ctx.sigma_r_tilde = b_c * stats.sigma_r.cast<Complex>() * b_c;
  const CMat zbar_gram_t = (cm.z_bar_aa() * cm.z_bar_aa().adjoint()).transpose();

  for (int k = 0; k < ctx.k; ++k) {
    const LinkStats& ru = stats.ris_ue[k];
    CMat r_t = hermitize(
        b_c * (ru.mu.adjoint() * ru.mu + ru.nlos_std * ru.nlos_std * ru.sigma_tx) * b_c);
    ctx.r_ru_tilde_sqrt.push_back(herm_sqrt_psd(r_t));
    ctx.sigma_ru_tilde.push_back(
        hermitize(hadamard(r_t, ctx.sigma_r_tilde.transpose())));
    ctx.sigma_c3.push_back(hermitize(c4z * hadamard(r_t, zbar_gram_t)));
    ctx.r_ru_tilde.push_back(std::move(r_t));
  }

  ctx.gram_z_tilde = hermitize(cm.z_tilde_aa().adjoint() * cm.z_tilde_aa());
  ctx.sigma_bar_a = hermitize(hadamard(ctx.gram_z_tilde, ctx.sigma_r_tilde.transpose()));
  ctx.sigma_hat_a = hermitize(c4z * hadamard(ctx.gram_z_tilde, zbar_gram_t));
  ctx.tr_r_aa_plus = (cm.z_aa_plus().adjoint() * cm.z_aa_plus()).trace().real();

  ctx.mu_br_tilde = b_c * stats.bs_ris.mu;
  for (int q = 0; q < ctx.q; ++q) ctx.mu_jr_tilde.push_back(b_c * stats.jam_ris[q].mu);

  ctx.sigma_b = stats.sigma_b;
  ctx.sigma_b_sqrt = herm_sqrt_psd(stats.sigma_b);
  for (int q = 0; q < ctx.q; ++q) {
    ctx.sigma_j.push_back(stats.sigma_j[q]);
    ctx.sigma_j_sqrt.push_back(herm_sqrt_psd(stats.sigma_j[q]));
  }
  ctx.nlos_br = stats.bs_ris.nlos_std;
  for (int q = 0; q < ctx.q; ++q) ctx.nlos_jr.push_back(stats.jam_ris[q].nlos_std);
  return ctx;
}

SurrogateMatrices build_surrogates(const ReflectionState& state, const CouplingModel& cm,
                                   const StatContext& ctx) {
  if (state.size() != ctx.m) throw ModelError("state size mismatch");
  SurrogateMatrices sm;
  sm.gamma_tilde = gamma_tilde_diag(state);
  const auto gt = sm.gamma_tilde.asDiagonal();
  const double c4z = 1.0 / std::pow(4.0 * ctx.z0, 2);
  const double c2z = 1.0 / std::pow(2.0 * ctx.z0, 2);

  const CMat gt_mu_br = gt * ctx.mu_br_tilde;              // Gamma~ mu~_BR, M x N
  const CMat gt_zbar = gt * cm.z_bar_aa();                 // Gamma~ Zbar_AA, M x M

  sm.c2.resize(ctx.q);
  std::vector<CMat> gt_mu_jr;
  for (int q = 0; q < ctx.q; ++q) gt_mu_jr.push_back(gt * ctx.mu_jr_tilde[q]);

  for (int k = 0; k < ctx.k; ++k) {
    const CMat& r_t = ctx.r_ru_tilde[k];
    const double ell2 =
        std::max(0.0, (sm.gamma_tilde.adjoint() * ctx.sigma_ru_tilde[k] * sm.gamma_tilde)(0)
                          .real());

    sm.c1.push_back(hermitize(ctx.r_bu[k] +
                              c4z * (gt_mu_br.adjoint() * r_t * gt_mu_br +
                                     ctx.nlos_br * ctx.nlos_br * ell2 * ctx.sigma_b)));
    for (int q = 0; q < ctx.q; ++q) {
      sm.c2[q].push_back(hermitize(
          ctx.r_ju[q][k] + c4z * (gt_mu_jr[q].adjoint() * r_t * gt_mu_jr[q] +
                                  ctx.nlos_jr[q] * ctx.nlos_jr[q] * ell2 * ctx.sigma_j[q])));
    }
    sm.c3.push_back(hermitize(ctx.r_ru[k] + c4z * gt_zbar.adjoint() * r_t * gt_zbar));

    // Stacked factor with h_c^H h_c = c1 exactly.
    CMat h(2 * ctx.n + ctx.m, ctx.n);
    h.topRows(ctx.n) = ctx.r_bu_sqrt[k];
    h.middleRows(ctx.n, ctx.m) =
        (1.0 / (4.0 * ctx.z0)) * ctx.r_ru_tilde_sqrt[k] * gt_mu_br;
    h.bottomRows(ctx.n) =
        (ctx.nlos_br / (4.0 * ctx.z0)) * std::sqrt(ell2) * ctx.sigma_b_sqrt;
    sm.h_c.push_back(std::move(h));
  }

  const double ell2_a =
      std::max(0.0,
               (sm.gamma_tilde.adjoint() * ctx.sigma_bar_a * sm.gamma_tilde)(0).real());
  const CMat gram_gt_z = hermitize((cm.z_tilde_aa() * gt).adjoint() * (cm.z_tilde_aa() * gt));

  sm.c4 = hermitize(ctx.r_br + c4z * (gt_mu_br.adjoint() * ctx.gram_z_tilde * gt_mu_br +
                                      ctx.nlos_br * ctx.nlos_br * ell2_a * ctx.sigma_b));
  for (int q = 0; q < ctx.q; ++q) {
    sm.c5.push_back(hermitize(
        ctx.r_jr[q] + c4z * (gt_mu_jr[q].adjoint() * ctx.gram_z_tilde * gt_mu_jr[q] +
                             ctx.nlos_jr[q] * ctx.nlos_jr[q] * ell2_a * ctx.sigma_j[q])));
  }
  sm.c6 = hermitize(c2z * cm.z_aa_plus().adjoint() * cm.z_aa_plus() +
                    c4z * cm.z_bar_aa().adjoint() * gram_gt_z * cm.z_bar_aa());
  return sm;
}

SurrogateMatrices build_surrogates(const ReflectionState& state, const CouplingModel& cm,
                                   const LinkStatsSet& stats) {
  return build_surrogates(state, cm, make_stat_context(cm, stats));
}

double ergodic_rate_bound(const std::vector<CVec>& w, const SurrogateMatrices& sm,
                          const JammerStrategy& jam, const NoiseParams& noise,
                          RVec* sinr_out) {
  const int k_total = static_cast<int>(sm.c1.size());
  RVec sinr(k_total);
  double rate = 0.0;
  for (int k = 0; k < k_total; ++k) {
    double signal = 0.0, interference = 0.0;
    for (int j = 0; j < k_total; ++j) {
      const double quad = (w[j].adjoint() * sm.c1[k] * w[j])(0).real();
      (j == k ? signal : interference) += quad;
    }
    double jbar = 0.0;
    for (int q = 0; q < jam.num_jammers(); ++q) {
      jbar += (jam.w[q][k].adjoint() * sm.c2[q][k] * jam.w[q][k])(0).real();
    }
    jbar += noise.sigma_r2 * sm.c3[k].trace().real();
    sinr(k) = signal / (interference + jbar + noise.sigma_k2);
    rate += std::log2(1.0 + sinr(k));
  }
  if (sinr_out) *sinr_out = sinr;
  return rate;
}

double amplification_power(const std::vector<CVec>& w, const SurrogateMatrices& sm,
                           const JammerStrategy& jam, double sigma_r2) {
  double p = 0.0;
  for (const auto& wk : w) p += (wk.adjoint() * sm.c4 * wk)(0).real();
  const int k_total = static_cast<int>(sm.c1.size());
  for (int q = 0; q < jam.num_jammers(); ++q) {
    for (int k = 0; k < k_total; ++k) {
      p += (jam.w[q][k].adjoint() * sm.c5[q] * jam.w[q][k])(0).real();
    }
  }
  p += sigma_r2 * sm.c6.trace().real();
  return p;
}

RateSample exact_rate_sample(const EffectiveChannels& eff, const std::vector<CVec>& w,
                             const JammerStrategy& jam, const NoiseParams& noise) {
  const int k_total = static_cast<int>(eff.ue.size());
  RateSample out;
  out.sinr = RVec(k_total);
  for (int k = 0; k < k_total; ++k) {
    double signal = 0.0, interference = 0.0;
    for (int j = 0; j < k_total; ++j) {
      const double p = std::norm((eff.ue[k] * w[j])(0));
      (j == k ? signal : interference) += p;
    }
    double jk = 0.0;
    for (int q = 0; q < static_cast<int>(eff.jam.size()); ++q) {
      jk += std::norm((eff.jam[q][k] * jam.w[q][k])(0));
    }
    jk += noise.sigma_r2 * eff.noise[k].squaredNorm();
    out.sinr(k) = signal / (interference + jk + noise.sigma_k2);
    out.rate += std::log2(1.0 + out.sinr(k));
  }
  return out;
}

double exact_output_power(const EffectiveChannels& eff, const std::vector<CVec>& w,
                          const JammerStrategy& jam, double sigma_r2) {
  double p = 0.0;
  for (const auto& wk : w) p += (eff.out_bs * wk).squaredNorm();
  for (int q = 0; q < static_cast<int>(eff.out_jam.size()); ++q) {
    for (const auto& wj : jam.w[q]) p += (eff.out_jam[q] * wj).squaredNorm();
  }
  p += sigma_r2 * eff.out_noise.squaredNorm();
  return p;
}

}  // namespace emcris
