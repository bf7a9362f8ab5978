#pragma once

#include "semifl/aircomp.hpp"

#include <algorithm>

namespace semifl {

struct Allocation {
  Eigen::VectorXd theta;  // SL data ratio per device
  Eigen::VectorXd fhat;   // device CPU frequency
  double ftilde = 0.0;    // BS CPU frequency
  ScalingFactors sf;
  Beamformers bf;
};

struct CostBreakdown {
  double T_G = 0;
  Eigen::VectorXd T_D, T_F;
  double T_E = 0;
  Eigen::VectorXd E_G, E_D, E_F;
  double E_E = 0;
  double T_all = 0;
  double E_all = 0;

  double E_uplink() const { return E_G.sum() + E_D.sum(); }
  double E_compute() const { return E_F.sum() + E_E; }
};

template <typename T>
T latency_gradient(long Q, int M, T T_s) {
  require(Q >= 1 && M >= 1, "Q and M must be >= 1");
  return static_cast<T>((Q + M - 1) / M) * T_s;
}

template <typename T>
T energy_gradient_upload(T omega, T gain, T T_G) {
  if (gain < T(kUnservableGain * kUnservableGain)) fail(ErrorCode::UnservableDevice, "|b^H h| below 1e-12");
  return omega * T_G / gain;
}

inline double energy_gradient_upload(double omega, const Eigen::VectorXcd& b, const Eigen::VectorXcd& h, long Q,
                                     int M, double T_s) {
  return energy_gradient_upload(omega, beam_gain(b, h), latency_gradient(Q, M, T_s));
}

template <typename T>
T latency_data(int D, T theta, T Cbar, T rate) {
  if (theta == T(0)) return T(0);
  if (!(rate > T(0))) fail(ErrorCode::InfeasibleUpload, "zero data rate with theta > 0");
  return T(D) * theta * Cbar / rate;
}

// gain = |v^H h_D|^2
template <typename T>
T energy_data(T zeta, T gain, int D, T theta, T Cbar, T rate) {
  if (theta == T(0)) return T(0);
  if (!(rate > T(0))) fail(ErrorCode::InfeasibleUpload, "zero data rate with theta > 0");
  if (gain < T(kUnservableGain * kUnservableGain)) fail(ErrorCode::UnservableDevice, "|v^H h| below 1e-12");
  return zeta * T(D) * theta * Cbar / (gain * rate);
}

template <typename T>
T latency_local(int D, T theta, T Chat, T fhat) {
  T work = T(D) * (T(1) - theta) * Chat;
  if (work <= T(0)) return T(0);
  if (!(fhat > T(0))) fail(ErrorCode::LatencyInfeasible, "zero device frequency with local work");
  return work / fhat;
}

template <typename T>
T energy_local(int D, T theta, T Chat, T kappa_hat, T fhat) {
  T work = T(D) * (T(1) - theta) * Chat;
  if (work <= T(0)) return T(0);
  return work * kappa_hat * fhat * fhat;
}

template <typename T>
T latency_edge(int D, T sum_theta, T Ctilde, T ftilde) {
  T work = T(D) * sum_theta * Ctilde;
  if (work <= T(0)) return T(0);
  if (!(ftilde > T(0))) fail(ErrorCode::LatencyInfeasible, "zero BS frequency with edge work");
  return work / ftilde;
}

template <typename T>
T energy_edge(int D, T sum_theta, T Ctilde, T kappa_tilde, T ftilde) {
  T work = T(D) * sum_theta * Ctilde;
  if (work <= T(0)) return T(0);
  return work * kappa_tilde * ftilde * ftilde;
}

double total_latency(const CostBreakdown& c);
double total_energy(const CostBreakdown& c);

// Full per-round accounting for an allocation on the channels the BS knows.
CostBreakdown compute_costs(const NetworkConfig& cfg, const ChannelRealization& ch, const Allocation& a);

}  // namespace semifl
