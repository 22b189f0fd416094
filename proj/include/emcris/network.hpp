// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "emcris/coupling.hpp"
#include "emcris/reflection.hpp"
#include "emcris/types.hpp"

namespace emcris {

enum class LinkForm { kS, kZ };

// One deterministic realization of every link matrix of the scenario.
struct ChannelSet {
  LinkForm form = LinkForm::kZ;
  CMat bs_ris;                         // M x N
  std::vector<CMat> jam_ris;           // per jammer, M x N_J
  std::vector<CRow> ris_ue;            // per UE, 1 x M
  std::vector<CRow> bs_ue;             // per UE, 1 x N
  std::vector<std::vector<CRow>> jam_ue;  // [q][k], 1 x N_J

  int num_ues() const { return static_cast<int>(ris_ue.size()); }
  int num_jammers() const { return static_cast<int>(jam_ris.size()); }
  void check_dims(int m) const;
};

enum class ChannelForm { kS, kZ, kDA };

// End-to-end and surface-output channel operators for one realization,
// tagged with the representation that produced them.
struct EffectiveChannels {
  ChannelForm form = ChannelForm::kZ;
  std::vector<CRow> ue;                   // H_E,k   1 x N
  std::vector<std::vector<CRow>> jam;     // H_J,qk  1 x N_J
  std::vector<CRow> noise;                // H_N,k   1 x M
  CMat out_bs;                            // M x N
  std::vector<CMat> out_jam;              // M x N_J
  CMat out_noise;                         // M x M
};

// Scattering-parameter model.  Fails with an oscillation error when the
// amplifier/coupling loop gain reaches unity (I - Gamma_A S_AA singular).
EffectiveChannels effective_channels_s(const CMat& gamma, const CouplingModel& cm,
                                       const ChannelSet& s_links);

// Impedance-parameter model for an arbitrary (not necessarily diagonal)
// load matrix z_load.
EffectiveChannels effective_channels_z(const CMat& z_load, const CouplingModel& cm,
                                       const ChannelSet& z_links);

// Converts a Z-form link set into the unique S-form set consistent with the
// impedance model.
ChannelSet s_links_from_z_links(const ChannelSet& z_links, const CouplingModel& cm);

// Decoupled (matching-network) model: channels affine in diag(Gamma_A) + 1,
// no inversion involving the reflection state.
EffectiveChannels da_channels(const ReflectionState& state, const CouplingModel& cm,
                              const ChannelSet& z_links);

}  // namespace emcris
