#pragma once

#include <numbers>

#include "semifl/netmodel.hpp"

namespace semifl {

struct ScalingFactors {
  double nu = 1.0;
  double omega = 1.0;
  Eigen::VectorXd zeta;  // one per device
};

struct Beamformers {
  Eigen::VectorXcd b;
  std::vector<Eigen::VectorXcd> v;
};

struct NormalizationStats {
  double mean = 0.0;
  double std = 1.0;
  bool constant = false;
};

inline constexpr double kUnservableGain = 1e-12;

template <typename T>
T mse_closed_form(int K, T omega, T nu, T sigma2) {
  using std::sqrt;
  require(nu > T(0), "nu must be positive");
  require(K >= 1, "K must be >= 1");
  T amp = sqrt(omega) / sqrt(nu) - T(1);
  return amp * amp / T(K) + sigma2 / (T(2) * nu);
}

template <typename T>
T uplink_rate(T zeta, T sigma2, T B) {
  using std::log1p;
  return B * log1p(zeta / sigma2) / T(std::numbers::ln2);
}

// |b^H h|^2
inline double beam_gain(const Eigen::VectorXcd& b, const Eigen::VectorXcd& h) { return std::norm(b.dot(h)); }

// Device transmit coefficient that makes the post-beamforming gain exactly sqrt(omega).
cplx tx_power_gradient(const Eigen::VectorXcd& b, const Eigen::VectorXcd& h, double omega);

struct NormalizedGradient {
  Eigen::VectorXd ghat;
  NormalizationStats stats;
};

NormalizedGradient normalize_gradient(const Eigen::Ref<const Eigen::VectorXd>& g);

Eigen::VectorXd denormalize(const Eigen::Ref<const Eigen::VectorXd>& ghat, const NormalizationStats& s);

Eigen::VectorXd denormalize_aggregate(const Eigen::Ref<const Eigen::VectorXd>& agg,
                                      const std::vector<NormalizationStats>& stats);

// Signal-level AirComp: devices pre-equalize with estimated channels, the superposition
// propagates through the true channels, the BS beamforms, scales by 1/sqrt(nu) and keeps the
// real part. One independent N_r-dimensional noise draw per entry.
Eigen::VectorXd aggregate_over_air(const std::vector<Eigen::VectorXd>& ghat, const Beamformers& bf,
                                   const ChannelRealization& ch, const ScalingFactors& sf,
                                   const NoiseModel& noise, Rng& rng);

// b: leading eigenvector of sum_k h_k h_k^H / |h_k|^2; v_k = h_k / |h_k|.
Beamformers matched_filter(const ChannelRealization& ch);

// Phase convention: largest-magnitude entry made real and positive.
Eigen::VectorXcd canonical_phase(const Eigen::VectorXcd& x);

}  // namespace semifl
