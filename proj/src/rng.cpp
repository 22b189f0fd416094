// SPDX-License-Identifier: Apache-2.0
#include "emcris/rng.hpp"

namespace emcris {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

RngStream RngStream::derive(std::initializer_list<std::uint64_t> labels) const {
  std::uint64_t s = seed_;
  for (std::uint64_t label : labels) {
    s = splitmix64(s ^ splitmix64(label + 0x632be59bd9b4e019ULL));
  }
  return RngStream(s);
}

double RngStream::uniform() {
  // 53-bit mantissa resolution, platform-independent given mt19937_64.
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double a, double b) { return a + (b - a) * uniform(); }

double RngStream::normal() {
  // Box-Muller on our own uniforms; avoids libstdc++ distribution state.
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

Complex RngStream::cnormal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-std::log(u1));  // so that E|z|^2 = 1
  return Complex(r * std::cos(2.0 * kPi * u2), r * std::sin(2.0 * kPi * u2));
}

CMat RngStream::cgaussian(Eigen::Index rows, Eigen::Index cols) {
  CMat m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = cnormal();
  return m;
}

}  // namespace emcris
