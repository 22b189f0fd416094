// SPDX-License-Identifier: Apache-2.0
#include "emcris/channel.hpp"

#include <cmath>

#include "emcris/linalg.hpp"

namespace emcris {
namespace {

double norm_sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  return std::sin(kPi * x) / (kPi * x);
}

struct RayAngles {
  double azimuth;
  double elevation;
  double sin_axis;  // direction cosine along the ULA axis (y)
};

RayAngles ray_angles(const Eigen::Vector3d& from, const Eigen::Vector3d& to) {
  const Eigen::Vector3d u = (to - from).normalized();
  RayAngles a;
  a.azimuth = std::atan2(u.y(), u.x());
  a.elevation = std::atan2(u.z(), std::hypot(u.x(), u.y()));
  a.sin_axis = u.y();
  return a;
}

double clamped_asin(double s) { return std::asin(std::clamp(s, -1.0, 1.0)); }

LinkStats make_link(CMat los, double d, double beta, const ChannelParams& p,
                    CMat sigma_rx, CMat sigma_tx) {
  LinkStats st;
  st.kappa = p.kappa;
  st.pl = path_loss_linear(path_loss_db(d, beta, p.beta0_db));
  st.eps_l = std::sqrt(st.kappa * st.pl / (st.kappa + 1.0));
  st.eps_n = std::sqrt(st.pl / (st.kappa + 1.0));
  st.nlos_std = p.z0 * st.eps_n;
  st.mu = p.z0 * st.eps_l * los;
  st.sigma_rx = std::move(sigma_rx);
  st.sigma_tx = std::move(sigma_tx);
  st.sigma_rx_sqrt = herm_sqrt_psd(st.sigma_rx);
  st.sigma_tx_sqrt = herm_sqrt_psd(st.sigma_tx);
  st.validate();
  return st;
}

}  // namespace

double path_loss_db(double d, double beta, double beta0_db) {
  if (!(d > 0.0)) throw ModelError("distance must be positive");
  return beta0_db + 10.0 * beta * std::log10(d);
}

double path_loss_linear(double pl_db) { return std::pow(10.0, -pl_db / 10.0); }

CVec ula_response(double angle, const RVec& positions, double lambda_c) {
  CVec a(positions.size());
  const double k = 2.0 * kPi / lambda_c;
  for (Eigen::Index n = 0; n < positions.size(); ++n) {
    a(n) = std::exp(kJ * (k * positions(n) * std::sin(angle)));
  }
  return a;
}

CVec upa_response(double azimuth, double elevation, const RisGeometry& geom) {
  const double k = 2.0 * kPi / geom.lambda_c;
  const double wy = k * std::cos(elevation) * std::sin(azimuth);
  const double wz = k * std::sin(elevation);
  CVec ah(geom.m_h), av(geom.m_v);
  for (int i = 0; i < geom.m_h; ++i) ah(i) = std::exp(kJ * (wy * i * geom.d_h));
  for (int i = 0; i < geom.m_v; ++i) av(i) = std::exp(kJ * (wz * i * geom.d_v));
  // row-major over the panel: vertical index slow, horizontal fast
  CVec a(geom.size());
  for (int v = 0; v < geom.m_v; ++v)
    for (int h = 0; h < geom.m_h; ++h) a(v * geom.m_h + h) = av(v) * ah(h);
  return a;
}

CMat exp_correlation(int n, double r, double phi) {
  if (!(r >= 0.0 && r < 1.0)) throw ModelError("correlation magnitude must be in [0,1)");
  const Complex delta = r * std::exp(kJ * phi);
  CMat s(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Complex d = std::pow(delta, std::abs(i - j));
      s(i, j) = (i >= j) ? d : std::conj(d);
    }
  }
  return s;
}

RMat sinc_correlation(const RisGeometry& geom, bool squared_arg) {
  geom.validate();
  const Eigen::Matrix3Xd u = geom.element_positions();
  const int m = geom.size();
  RMat s(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const double d = (u.col(i) - u.col(j)).norm();
      const double arg = squared_arg ? 2.0 * d * d / geom.lambda_c : 2.0 * d / geom.lambda_c;
      s(i, j) = norm_sinc(arg);
    }
  }
  return s;
}

void LinkStats::validate() const {
  if (sigma_rx.rows() != rows() || sigma_tx.rows() != cols()) {
    throw ModelError("correlation dimensions inconsistent with the mean");
  }
  const double split = eps_l * eps_l + eps_n * eps_n;
  if (std::abs(split - pl) > 1e-12 * std::max(pl, 1e-300)) {
    throw ModelError("Rician power split violated");
  }
}

LinkStatsSet link_statistics(const NodeGeometry& nodes, const RisGeometry& ris,
                             const ChannelParams& params) {
  nodes.validate();
  ris.validate();
  const int n = nodes.n_bs;
  const int nj = nodes.n_jam;
  const RVec bs_pos = nodes.ula_positions(n);
  const RVec jam_pos = nodes.ula_positions(nj);

  LinkStatsSet set;
  set.sigma_r = sinc_correlation(ris, params.sinc_squared_arg);
  const CMat sigma_r_c = set.sigma_r.cast<Complex>();

  // Correlation phases follow the node -> surface ray (one matrix per node).
  const RayAngles bs_to_ris = ray_angles(nodes.bs_pos, nodes.ris_pos);
  set.sigma_b = exp_correlation(n, params.corr_r, bs_to_ris.azimuth);
  for (const auto& jp : nodes.jam_pos) {
    set.sigma_j.push_back(exp_correlation(nj, params.corr_r, ray_angles(jp, nodes.ris_pos).azimuth));
  }

  // BS -> surface
  {
    const RayAngles arrival = ray_angles(nodes.ris_pos, nodes.bs_pos);
    const CVec a_ris = upa_response(arrival.azimuth, arrival.elevation, ris);
    const CVec a_bs = ula_response(clamped_asin(bs_to_ris.sin_axis), bs_pos, params.lambda_c);
    const double d = (nodes.bs_pos - nodes.ris_pos).norm();
    set.bs_ris = make_link(a_ris * a_bs.transpose(), d, params.beta_br, params, sigma_r_c,
                           set.sigma_b);
  }

  // jammers -> surface
  for (size_t q = 0; q < nodes.jam_pos.size(); ++q) {
    const RayAngles arrival = ray_angles(nodes.ris_pos, nodes.jam_pos[q]);
    const RayAngles depart = ray_angles(nodes.jam_pos[q], nodes.ris_pos);
    const CVec a_ris = upa_response(arrival.azimuth, arrival.elevation, ris);
    const CVec a_jam = ula_response(clamped_asin(depart.sin_axis), jam_pos, params.lambda_c);
    const double d = (nodes.jam_pos[q] - nodes.ris_pos).norm();
    set.jam_ris.push_back(make_link(a_ris * a_jam.transpose(), d, params.beta_jr, params,
                                    sigma_r_c, set.sigma_j[q]));
  }

  const CMat one = CMat::Identity(1, 1);
  for (size_t k = 0; k < nodes.ue_pos.size(); ++k) {
    // surface -> UE
    {
      const RayAngles depart = ray_angles(nodes.ris_pos, nodes.ue_pos[k]);
      const CVec a_ris = upa_response(depart.azimuth, depart.elevation, ris);
      const double d = (nodes.ue_pos[k] - nodes.ris_pos).norm();
      set.ris_ue.push_back(
          make_link(a_ris.transpose(), d, params.beta_ru, params, one, sigma_r_c));
    }
    // BS -> UE
    {
      const RayAngles depart = ray_angles(nodes.bs_pos, nodes.ue_pos[k]);
      const CVec a_bs = ula_response(clamped_asin(depart.sin_axis), bs_pos, params.lambda_c);
      const double d = (nodes.ue_pos[k] - nodes.bs_pos).norm();
      set.bs_ue.push_back(
          make_link(a_bs.transpose(), d, params.beta_bu, params, one, set.sigma_b));
    }
  }

  set.jam_ue.resize(nodes.jam_pos.size());
  for (size_t q = 0; q < nodes.jam_pos.size(); ++q) {
    for (size_t k = 0; k < nodes.ue_pos.size(); ++k) {
      const RayAngles depart = ray_angles(nodes.jam_pos[q], nodes.ue_pos[k]);
      const CVec a_jam = ula_response(clamped_asin(depart.sin_axis), jam_pos, params.lambda_c);
      const double d = (nodes.ue_pos[k] - nodes.jam_pos[q]).norm();
      set.jam_ue[q].push_back(
          make_link(a_jam.transpose(), d, params.beta_ju, params, one, set.sigma_j[q]));
    }
  }
  return set;
}

CMat sample_channel(const LinkStats& stats, RngStream& rng) {
  if (stats.nlos_std == 0.0) return stats.mu;
  const CMat w = rng.cgaussian(stats.rows(), stats.cols());
  return stats.mu + stats.nlos_std * (stats.sigma_rx_sqrt * w * stats.sigma_tx_sqrt);
}

ChannelSet sample_channel_set(const LinkStatsSet& set, RngStream& rng) {
  ChannelSet links;
  links.form = LinkForm::kZ;
  links.bs_ris = sample_channel(set.bs_ris, rng);
  for (const auto& st : set.jam_ris) links.jam_ris.push_back(sample_channel(st, rng));
  for (const auto& st : set.ris_ue) links.ris_ue.push_back(sample_channel(st, rng).row(0));
  for (const auto& st : set.bs_ue) links.bs_ue.push_back(sample_channel(st, rng).row(0));
  links.jam_ue.resize(set.jam_ue.size());
  for (size_t q = 0; q < set.jam_ue.size(); ++q) {
    for (const auto& st : set.jam_ue[q]) {
      links.jam_ue[q].push_back(sample_channel(st, rng).row(0));
    }
  }
  return links;
}

}  // namespace emcris
