// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "emcris/geometry.hpp"
#include "emcris/network.hpp"
#include "emcris/rng.hpp"
#include "emcris/types.hpp"

namespace emcris {

// Path loss in dB at distance d (meters), reference distance 1 m.
double path_loss_db(double d, double beta, double beta0_db);
// Linear power gain for a loss of pl_db.
double path_loss_linear(double pl_db);

// ULA response, entries exp(j (2 pi / lambda) x_n sin(angle)); the array axis
// is the global y axis and angles are measured from broadside.
CVec ula_response(double angle, const RVec& positions, double lambda_c);

// UPA response a_v(azimuth, elevation) kron a_h(azimuth, elevation) for the
// surface in the x = 0 plane with boresight +x: element phase
// (2 pi / lambda) * (y_m cos(el) sin(az) + z_m sin(el)).
CVec upa_response(double azimuth, double elevation, const RisGeometry& geom);

// Exponential correlation with coefficient delta = r e^{j phi}, entries
// delta^{|i1-i2|} above the diagonal and conjugated below.
CMat exp_correlation(int n, double r, double phi);

// Surface correlation Sigma_R(i,j) = sinc(2 ||u_i - u_j|| / lambda) with the
// normalized sinc sin(pi x)/(pi x).  squared_arg switches the argument to
// 2 ||u_i - u_j||^2 / lambda for sensitivity checks.
RMat sinc_correlation(const RisGeometry& geom, bool squared_arg = false);

// First and second-order description of one link.  mu is stored in impedance
// units (Z0 absorbed); eps_l/eps_n are the unitless Rician split factors with
// eps_l^2 + eps_n^2 = pl, and nlos_std = Z0 * eps_n is the entry standard
// deviation used for sampling.
struct LinkStats {
  CMat mu;
  double eps_l = 0.0;
  double eps_n = 0.0;
  double kappa = 0.0;
  double pl = 0.0;       // linear path gain
  double nlos_std = 0.0; // Z0 * eps_n
  CMat sigma_rx, sigma_tx;
  CMat sigma_rx_sqrt, sigma_tx_sqrt;

  Eigen::Index rows() const { return mu.rows(); }
  Eigen::Index cols() const { return mu.cols(); }
  void validate() const;
};

struct ChannelParams {
  double z0 = 50.0;
  double lambda_c = 0.12491352;  // 2.4 GHz
  double beta0_db = 30.0;
  double beta_bu = 2.75;
  double beta_ju = 2.75;
  double beta_br = 2.5;
  double beta_jr = 2.5;
  double beta_ru = 2.2;
  double kappa = 3.0;
  double corr_r = 0.5;          // exponential correlation magnitude (BS / jammers)
  bool sinc_squared_arg = false;
};

// Statistics of every link in the scenario.
struct LinkStatsSet {
  LinkStats bs_ris;                       // M x N
  std::vector<LinkStats> jam_ris;         // per q, M x N_J
  std::vector<LinkStats> ris_ue;          // per k, 1 x M
  std::vector<LinkStats> bs_ue;           // per k, 1 x N
  std::vector<std::vector<LinkStats>> jam_ue;  // [q][k], 1 x N_J
  CMat sigma_b;                           // N x N
  std::vector<CMat> sigma_j;              // per q
  RMat sigma_r;                           // M x M

  int num_ues() const { return static_cast<int>(ris_ue.size()); }
  int num_jammers() const { return static_cast<int>(jam_ris.size()); }
};

LinkStatsSet link_statistics(const NodeGeometry& nodes, const RisGeometry& ris,
                             const ChannelParams& params);

// One draw Z = mu + nlos_std * Sigma_rx^{1/2} W Sigma_tx^{1/2}, W iid CN(0,1).
CMat sample_channel(const LinkStats& stats, RngStream& rng);

// Z-form realization of the full link set.
ChannelSet sample_channel_set(const LinkStatsSet& set, RngStream& rng);

}  // namespace emcris
