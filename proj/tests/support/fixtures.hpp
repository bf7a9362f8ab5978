#pragma once

// Shared random instances for unit and acceptance tests.

#include "semifl/allocator.hpp"

#include <cmath>
#include <numbers>

namespace semifl::fixtures {

inline NetworkConfig network(int K, int N_r) {
  NetworkConfig c;
  c.K = K;
  c.N_r = N_r;
  c.Chat = spread_cycles(K);
  return c;
}

inline ChannelRealization channels(const NetworkConfig& c, std::uint64_t seed) {
  Rng rng = make_rng(seed, 0x4348);
  return sample_channels(c, Fading::rayleigh(), rng);
}

inline AssumptionConstants contractive() { return {1.0, 1.0, 0.1, 0.0}; }

// Smallest eps2 on the feasible side of (eps1-1)^2 < K eps2, widened by `slack`.
inline double feasible_eps2(double eps1, int K, double slack) { return (eps1 - 1) * (eps1 - 1) / K + slack; }

// Unit-norm vectors in C^2 up to a global phase: (cos a, e^{i phi} sin a).
template <typename F>
void sphere_grid_2(int n_a, int n_phi, F&& visit) {
  for (int i = 0; i <= n_a; ++i) {
    double a = std::numbers::pi / 2 * i / n_a;
    for (int j = 0; j < n_phi; ++j) {
      double phi = 2 * std::numbers::pi * j / n_phi;
      Eigen::VectorXcd b(2);
      b << std::cos(a), std::polar(std::sin(a), phi);
      visit(b);
    }
  }
}

// |b^H h|^2 without going through the library helper.
inline double gain(const Eigen::VectorXcd& b, const Eigen::VectorXcd& h) { return std::norm(b.dot(h)); }

}  // namespace semifl::fixtures
