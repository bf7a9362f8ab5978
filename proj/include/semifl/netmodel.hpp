#pragma once

#include "semifl/common.hpp"

#include <cmath>

namespace semifl {

struct NetworkConfig {
  int K = 20;
  int N_r = 16;
  double B = 1e4;            // Hz per data segment
  double sigma2 = 1e-11;     // W
  double p_max = 0.19952623149688797;  // W (23 dBm)
  double T_s = 1e-3;         // s per AirComp block
  int M = 14;                // entries per AirComp block
  int D = 3000;              // samples per device
  double Cbar = 2048;        // bits per intermediate output
  Eigen::VectorXd Chat;      // cycles per local sample, one per device
  double Ctilde = 1e8;       // cycles per intermediate output at the BS
  double kappa_hat = 1e-28;
  double kappa_tilde = 1e-28;
  double fhat_max = 1e9;
  double ftilde_max = 1e10;
  long Q = 14000;
  long Q1 = 7000;

  long Q2() const { return Q - Q1; }
  void validate() const;
};

// Device cycle counts spread evenly over [lo, hi]; deterministic.
Eigen::VectorXd spread_cycles(int K, double lo = 1.5e8, double hi = 2.8e8);

struct Fading {
  enum class Kind { Rayleigh, Rician } kind = Kind::Rayleigh;
  double k_factor = 0.0;  // Rician K-factor, may be +inf

  static Fading rayleigh() { return {}; }
  static Fading rician(double k) { return {Kind::Rician, k}; }
};

struct ChannelRealization {
  std::vector<Eigen::VectorXcd> hG, hD;            // what the BS knows
  std::vector<Eigen::VectorXcd> hG_true, hD_true;  // filled only under imperfect CSI

  bool imperfect() const { return !hG_true.empty(); }
  const Eigen::VectorXcd& propagation_G(int k) const { return imperfect() ? hG_true[k] : hG[k]; }
  const Eigen::VectorXcd& propagation_D(int k) const { return imperfect() ? hD_true[k] : hD[k]; }
  int K() const { return static_cast<int>(hG.size()); }
};

struct NoiseModel {
  enum class Kind { Gaussian, AlphaStable } kind = Kind::Gaussian;
  double sigma2 = 0.0;  // gaussian; 0 means noiseless
  double alpha = 2.0;   // alpha-stable characteristic exponent
  double scale = 0.0;   // alpha-stable scale per real dimension

  static NoiseModel gaussian(double s2) { return {Kind::Gaussian, s2, 2.0, 0.0}; }
  static NoiseModel alpha_stable(double a, double c) { return {Kind::AlphaStable, 0.0, a, c}; }
  void validate() const;
};

template <typename T>
T dbm_to_watts(T x_dbm) {
  using std::pow;
  return pow(T(10), (x_dbm - T(30)) / T(10));
}

template <typename T>
T watts_to_dbm(T w) {
  using std::log10;
  return T(10) * log10(w) + T(30);
}

// Unit-modulus line-of-sight steering vector of a half-wavelength array.
Eigen::VectorXcd los_steering(int N_r, double angle);

// Arrival angle assigned to device k of K; spread over (-pi/2, pi/2).
double los_angle(int k, int K);

ChannelRealization sample_channels(const NetworkConfig& cfg, const Fading& fading, Rng& rng);

struct CsiPair {
  Eigen::VectorXcd h_est, h_true;
};

CsiPair apply_csi_error(const Eigen::VectorXcd& h, double ratio, Rng& rng);

// Applies the error to every vector of a realization.
void apply_csi_error(ChannelRealization& ch, double ratio, Rng& rng);

Eigen::VectorXcd sample_noise(const NoiseModel& model, Index n, Rng& rng);

// One symmetric alpha-stable variate with unit scale (Chambers-Mallows-Stuck).
double sample_symmetric_stable(double alpha, Rng& rng);

// Circular complex Gaussian with E|z|^2 = var.
Eigen::VectorXcd complex_gaussian(Index n, double var, Rng& rng);

}  // namespace semifl
