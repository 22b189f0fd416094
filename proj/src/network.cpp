// SPDX-License-Identifier: Apache-2.0
#include "emcris/network.hpp"

#include <Eigen/LU>

namespace emcris {

void ChannelSet::check_dims(int m) const {
  if (bs_ris.rows() != m) throw ModelError("bs_ris row count != M");
  for (const auto& z : jam_ris)
    if (z.rows() != m) throw ModelError("jam_ris row count != M");
  for (const auto& z : ris_ue)
    if (z.cols() != m) throw ModelError("ris_ue column count != M");
  if (jam_ue.size() != jam_ris.size()) throw ModelError("jammer link count mismatch");
  for (const auto& per_q : jam_ue)
    if (per_q.size() != ris_ue.size()) throw ModelError("jam_ue UE count mismatch");
}

EffectiveChannels effective_channels_s(const CMat& gamma, const CouplingModel& cm,
                                       const ChannelSet& s_links) {
  if (s_links.form != LinkForm::kS) throw ModelError("expected S-form links");
  const int m = cm.size();
  s_links.check_dims(m);

  const CMat loop = CMat::Identity(m, m) - gamma * cm.s_aa();
  Eigen::PartialPivLU<CMat> lu(loop);
  if (lu.rcond() < 1e-12) {
    throw ModelError("oscillation condition: loop gain reaches unity");
  }
  const CMat f = lu.solve(gamma);  // (I - Gamma S_AA)^{-1} Gamma

  EffectiveChannels eff;
  eff.form = ChannelForm::kS;
  eff.out_bs = f * s_links.bs_ris;
  eff.out_noise = f;
  for (const auto& s_jr : s_links.jam_ris) eff.out_jam.push_back(f * s_jr);
  for (int k = 0; k < s_links.num_ues(); ++k) {
    eff.ue.push_back(s_links.bs_ue[k] + s_links.ris_ue[k] * eff.out_bs);
    eff.noise.push_back(s_links.ris_ue[k] * f);
  }
  eff.jam.resize(s_links.num_jammers());
  for (int q = 0; q < s_links.num_jammers(); ++q) {
    for (int k = 0; k < s_links.num_ues(); ++k) {
      eff.jam[q].push_back(s_links.jam_ue[q][k] + s_links.ris_ue[k] * eff.out_jam[q]);
    }
  }
  return eff;
}

EffectiveChannels effective_channels_z(const CMat& z_load, const CouplingModel& cm,
                                       const ChannelSet& z_links) {
  if (z_links.form != LinkForm::kZ) throw ModelError("expected Z-form links");
  const int m = cm.size();
  z_links.check_dims(m);

  Eigen::PartialPivLU<CMat> lu(z_load + cm.z_aa());
  if (lu.rcond() < 1e-12) throw ModelError("resonant load/coupling combination");
  const CMat t = lu.inverse();  // (Z_A + Z_AA)^{-1}
  const double s = 1.0 / (2.0 * cm.z0());
  const CMat za_minus = z_load - cm.z0() * CMat::Identity(m, m);
  const CMat amt = za_minus * t;  // shared output factor (Z_A - Z0 I)(Z_A + Z_AA)^{-1}

  EffectiveChannels eff;
  eff.form = ChannelForm::kZ;
  eff.out_bs = s * amt * z_links.bs_ris;
  eff.out_noise = s * amt * cm.z_aa_plus();
  for (const auto& z_jr : z_links.jam_ris) eff.out_jam.push_back(s * amt * z_jr);

  const CMat noise_factor = CMat::Identity(m, m) - t * cm.z_aa_plus();
  for (int k = 0; k < z_links.num_ues(); ++k) {
    eff.ue.push_back(s * (z_links.bs_ue[k] - z_links.ris_ue[k] * t * z_links.bs_ris));
    eff.noise.push_back(s * z_links.ris_ue[k] * noise_factor);
  }
  eff.jam.resize(z_links.num_jammers());
  for (int q = 0; q < z_links.num_jammers(); ++q) {
    for (int k = 0; k < z_links.num_ues(); ++k) {
      eff.jam[q].push_back(
          s * (z_links.jam_ue[q][k] - z_links.ris_ue[k] * t * z_links.jam_ris[q]));
    }
  }
  return eff;
}

ChannelSet s_links_from_z_links(const ChannelSet& z_links, const CouplingModel& cm) {
  if (z_links.form != LinkForm::kZ) throw ModelError("expected Z-form links");
  const int m = cm.size();
  z_links.check_dims(m);

  Eigen::PartialPivLU<CMat> lu(cm.z_aa_plus());
  if (lu.rcond() < 1e-14) throw ModelError("degenerate coupling matrix");
  const double s = 1.0 / (2.0 * cm.z0());
  const CMat z_aa_minus = cm.z_aa() - cm.z0() * CMat::Identity(m, m);
  const CMat ru_factor = CMat::Identity(m, m) - lu.solve(z_aa_minus);

  ChannelSet out;
  out.form = LinkForm::kS;
  out.bs_ris = lu.solve(z_links.bs_ris);
  for (const auto& z_jr : z_links.jam_ris) out.jam_ris.push_back(lu.solve(z_jr));
  for (int k = 0; k < z_links.num_ues(); ++k) {
    out.ris_ue.push_back(s * z_links.ris_ue[k] * ru_factor);
    out.bs_ue.push_back(s * (z_links.bs_ue[k] - z_links.ris_ue[k] * out.bs_ris));
  }
  out.jam_ue.resize(z_links.num_jammers());
  for (int q = 0; q < z_links.num_jammers(); ++q) {
    for (int k = 0; k < z_links.num_ues(); ++k) {
      out.jam_ue[q].push_back(
          s * (z_links.jam_ue[q][k] - z_links.ris_ue[k] * out.jam_ris[q]));
    }
  }
  return out;
}

EffectiveChannels da_channels(const ReflectionState& state, const CouplingModel& cm,
                              const ChannelSet& z_links) {
  if (z_links.form != LinkForm::kZ) throw ModelError("expected Z-form links");
  const int m = cm.size();
  z_links.check_dims(m);
  if (state.size() != m) throw ModelError("state size != M");

  const double s = 1.0 / (2.0 * cm.z0());
  const CVec gt = gamma_tilde_diag(state);
  const RMat& b = cm.re_sqrt_inv();

  // Half the cascade through the matching network, shared by all operators.
  const CMat g_half = 0.5 * gt.asDiagonal() * b;        // (1/2) Gamma~ Re^{-1/2}
  const CMat cascade_bs = g_half * z_links.bs_ris;      // (1/2) Gamma~ Z~_BR
  const CMat cascade_noise = g_half * cm.z_aa_plus();   // (1/2) Gamma~ Zbar_AA
  std::vector<CMat> cascade_jam;
  cascade_jam.reserve(z_links.num_jammers());
  for (const auto& z_jr : z_links.jam_ris) cascade_jam.push_back(g_half * z_jr);

  EffectiveChannels eff;
  eff.form = ChannelForm::kDA;
  eff.out_bs = s * (z_links.bs_ris - cm.z_tilde_aa() * cascade_bs);
  eff.out_noise = s * (cm.z_aa_plus() - cm.z_tilde_aa() * cascade_noise);
  for (int q = 0; q < z_links.num_jammers(); ++q) {
    eff.out_jam.push_back(s * (z_links.jam_ris[q] - cm.z_tilde_aa() * cascade_jam[q]));
  }
  for (int k = 0; k < z_links.num_ues(); ++k) {
    const CRow ru_b = z_links.ris_ue[k] * b;  // Z~_RU,k
    eff.ue.push_back(s * (z_links.bs_ue[k] - ru_b * cascade_bs));
    eff.noise.push_back(s * (z_links.ris_ue[k] - ru_b * cascade_noise));
  }
  eff.jam.resize(z_links.num_jammers());
  for (int q = 0; q < z_links.num_jammers(); ++q) {
    for (int k = 0; k < z_links.num_ues(); ++k) {
      const CRow ru_b = z_links.ris_ue[k] * b;
      eff.jam[q].push_back(s * (z_links.jam_ue[q][k] - ru_b * cascade_jam[q]));
    }
  }
  return eff;
}

}  // namespace emcris
