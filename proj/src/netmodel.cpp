#include "semifl/netmodel.hpp"

#include <numbers>

namespace semifl {

void NetworkConfig::validate() const {
  require(K >= 1, "K must be >= 1");
  require(N_r >= 1, "N_r must be >= 1");
  require(B > 0 && sigma2 > 0 && p_max > 0 && T_s > 0, "bandwidth, noise, power and T_s must be positive");
  require(M >= 1 && D >= 1, "M and D must be >= 1");
  require(Cbar > 0 && Ctilde > 0, "cycle/bit counts must be positive");
  require(kappa_hat > 0 && kappa_tilde > 0, "capacitances must be positive");
  require(fhat_max > 0 && ftilde_max > 0, "frequency caps must be positive");
  require(Chat.size() == K, "Chat needs one entry per device");
  require((Chat.array() > 0).all(), "Chat entries must be positive");
  require(Q >= 2 && Q1 >= 1 && Q1 < Q, "model split needs 0 < Q1 < Q");
}

Eigen::VectorXd spread_cycles(int K, double lo, double hi) {
  if (K == 1) return Eigen::VectorXd::Constant(1, 0.5 * (lo + hi));
  return Eigen::VectorXd::LinSpaced(K, lo, hi);
}

void NoiseModel::validate() const {
  if (kind == Kind::Gaussian) {
    require(sigma2 >= 0, "noise power must be nonnegative");
  } else {
    require(alpha > 0 && alpha <= 2, "alpha must lie in (0, 2]");
    require(scale >= 0, "stable scale must be nonnegative");
  }
}

Eigen::VectorXcd complex_gaussian(Index n, double var, Rng& rng) {
  std::normal_distribution<double> nd(0.0, std::sqrt(var / 2.0));
  Eigen::VectorXcd z(n);
  for (Index i = 0; i < n; ++i) {
    double re = nd(rng);
    double im = nd(rng);
    z[i] = cplx(re, im);
  }
  return z;
}

Eigen::VectorXcd los_steering(int N_r, double angle) {
  Eigen::VectorXcd a(N_r);
  for (int n = 0; n < N_r; ++n) a[n] = std::polar(1.0, std::numbers::pi * n * std::sin(angle));
  return a;
}

double los_angle(int k, int K) { return std::numbers::pi * ((k + 0.5) / K - 0.5); }

ChannelRealization sample_channels(const NetworkConfig& cfg, const Fading& fading, Rng& rng) {
  ChannelRealization ch;
  ch.hG.reserve(cfg.K);
  ch.hD.reserve(cfg.K);
  auto draw = [&](int k) -> Eigen::VectorXcd {
    Eigen::VectorXcd scatter = complex_gaussian(cfg.N_r, 1.0, rng);
    if (fading.kind == Fading::Kind::Rayleigh) return scatter;
    require(fading.k_factor >= 0, "Rician K-factor must be nonnegative");
    Eigen::VectorXcd los = los_steering(cfg.N_r, los_angle(k, cfg.K));
    if (std::isinf(fading.k_factor)) return los;
    double kf = fading.k_factor;
    return std::sqrt(kf / (kf + 1)) * los + std::sqrt(1 / (kf + 1)) * scatter;
  };
  for (int k = 0; k < cfg.K; ++k) ch.hG.push_back(draw(k));
  for (int k = 0; k < cfg.K; ++k) ch.hD.push_back(draw(k));
  return ch;
}

CsiPair apply_csi_error(const Eigen::VectorXcd& h, double ratio, Rng& rng) {
  require(ratio >= 0, "CSI error ratio must be nonnegative");
  CsiPair out{h, h};
  if (ratio == 0 || h.size() == 0) return out;
  double per_entry = ratio * h.squaredNorm() / static_cast<double>(h.size());
  out.h_true = h + complex_gaussian(h.size(), per_entry, rng);
  return out;
}

void apply_csi_error(ChannelRealization& ch, double ratio, Rng& rng) {
  require(ratio >= 0, "CSI error ratio must be nonnegative");
  ch.hG_true.clear();
  ch.hD_true.clear();
  if (ratio == 0) return;
  for (auto& h : ch.hG) ch.hG_true.push_back(apply_csi_error(h, ratio, rng).h_true);
  for (auto& h : ch.hD) ch.hD_true.push_back(apply_csi_error(h, ratio, rng).h_true);
}

double sample_symmetric_stable(double alpha, Rng& rng) {
  constexpr double pi = std::numbers::pi;
  std::uniform_real_distribution<double> ud(-pi / 2, pi / 2);
  std::exponential_distribution<double> ed(1.0);
  double V = ud(rng);
  double W = ed(rng);
  if (alpha == 1.0) return std::tan(V);
  double a = std::sin(alpha * V) / std::pow(std::cos(V), 1.0 / alpha);
  double b = std::pow(std::cos((1.0 - alpha) * V) / W, (1.0 - alpha) / alpha);
  return a * b;
}

Eigen::VectorXcd sample_noise(const NoiseModel& model, Index n, Rng& rng) {
  require(n >= 1, "noise count must be >= 1");
  model.validate();
  if (model.kind == NoiseModel::Kind::Gaussian) {
    if (model.sigma2 == 0) return Eigen::VectorXcd::Zero(n);
    return complex_gaussian(n, model.sigma2, rng);
  }
  Eigen::VectorXcd z(n);
  for (Index i = 0; i < n; ++i) {
    double re = model.scale * sample_symmetric_stable(model.alpha, rng);
    double im = model.scale * sample_symmetric_stable(model.alpha, rng);
    z[i] = cplx(re, im);
  }
  return z;
}

}  // namespace semifl
