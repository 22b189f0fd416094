// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

#include "emcris/types.hpp"

namespace emcris {

// Seedable counter-style stream.  A stream is identified by a master seed
// plus a list of integer labels (scheme, sweep point, trial, purpose);
// derive() mixes the labels through splitmix64 so sibling streams are
// decorrelated and a sweep can run its trials concurrently while staying
// reproducible.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  RngStream derive(std::initializer_list<std::uint64_t> labels) const;

  double uniform();                    // U[0,1)
  double uniform(double a, double b);  // U[a,b)
  double normal();                     // N(0,1)
  Complex cnormal();                   // CN(0,1), E|z|^2 = 1

  // Matrix of i.i.d. CN(0,1) entries.
  CMat cgaussian(Eigen::Index rows, Eigen::Index cols);

  std::uint64_t seed() const { return seed_; }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace emcris
