#include "semifl/allocator.hpp"

#include <numbers>
#include <sstream>

namespace semifl {

Eigen::VectorXd zeta_closed_form(const NetworkConfig& cfg, const Eigen::VectorXd& theta, double T_E, double T_max) {
  if (!(T_max > T_E)) fail(ErrorCode::LatencyInfeasible, "T_max must exceed the edge latency T_E");
  Eigen::VectorXd zeta(theta.size());
  for (Index k = 0; k < theta.size(); ++k) {
    double C3 = cfg.D * cfg.Cbar * theta[k] / cfg.B;
    zeta[k] = cfg.sigma2 * std::expm1(C3 / (T_max - T_E) * std::numbers::ln2);
  }
  return zeta;
}

namespace {

double edge_latency(const NetworkConfig& cfg, const Eigen::VectorXd& theta, double ftilde) {
  return latency_edge(cfg.D, theta.sum(), cfg.Ctilde, ftilde);
}

void check_data_power(const NetworkConfig& cfg, const ChannelRealization& ch, const Beamformers& bf,
                      const Eigen::VectorXd& zeta) {
  for (int k = 0; k < cfg.K; ++k) {
    double C4 = cfg.p_max * beam_gain(bf.v[k], ch.hD[k]);
    if (zeta[k] > C4 * (1 + 1e-12)) {
      std::ostringstream os;
      os << "zeta*_" << k << " = " << zeta[k] << " exceeds p_max|v^H h|^2 = " << C4;
      fail(ErrorCode::PowerBudgetExceeded, os.str());
    }
  }
}

}  // namespace

ScalingSolution solve_scaling_ns(const NetworkConfig& cfg, const ChannelRealization& ch, const RegionThresholds& thr,
                                 const Beamformers& bf, const Eigen::VectorXd& theta, double ftilde) {
  require(thr.eps1 >= 1 && thr.eps2 > 0, "eps1 >= 1 and eps2 > 0 required");
  const double K = cfg.K;
  double margin = K * thr.eps2 - (thr.eps1 - 1) * (thr.eps1 - 1);
  if (!(margin > 0)) {
    std::ostringstream os;
    os << "(eps1-1)^2 = " << (thr.eps1 - 1) * (thr.eps1 - 1) << " >= K*eps2 = " << K * thr.eps2;
    fail(ErrorCode::InfeasibleMse, os.str());
  }
  ScalingSolution s;
  s.nu = (K * cfg.sigma2 / 2) / margin;
  s.omega = thr.eps1 * thr.eps1 * s.nu;
  double C5 = power_cap_omega(cfg, ch, bf.b);
  if (s.omega > C5) {
    std::ostringstream os;
    os << "omega* = " << s.omega << " exceeds C5 = " << C5;
    fail(ErrorCode::PowerBudgetExceeded, os.str());
  }
  s.zeta = zeta_closed_form(cfg, theta, edge_latency(cfg, theta, ftilde), thr.T_max);
  check_data_power(cfg, ch, bf, s.zeta);
  s.tau = thr.T_max;
  return s;
}

ScalingSolution solve_scaling_s(const NetworkConfig& cfg, const ChannelRealization& ch, const RegionThresholds& thr,
                                const AssumptionConstants& ac, const Beamformers& bf, const Eigen::VectorXd& theta,
                                double ftilde) {
  require(ac.mu > 0 && ac.L > 0, "L and mu must be positive");
  if (!(4 * ac.mu > ac.L)) fail(ErrorCode::NonContractive, "stable-region closed form needs 4 mu > L");
  double C20 = ac.A2 - thr.eps3 * ac.mu * (4 * ac.mu - ac.L) / ac.L;
  if (!(C20 < 0)) {
    std::ostringstream os;
    os << "C20 = " << C20 << " >= 0: gap target eps3 below the A2 floor";
    fail(ErrorCode::GapInfeasible, os.str());
  }
  double C21 = static_cast<double>(cfg.Q) * cfg.sigma2 / 2;
  ScalingSolution s;
  s.nu = std::max(-C21 / C20, cfg.sigma2 / (2 * thr.eps4));
  s.omega = s.nu;
  double C5 = power_cap_omega(cfg, ch, bf.b);
  if (s.nu > C5) {
    std::ostringstream os;
    os << "nu* = " << s.nu << " exceeds C5 = " << C5;
    fail(ErrorCode::PowerBudgetExceeded, os.str());
  }
  s.zeta = zeta_closed_form(cfg, theta, edge_latency(cfg, theta, ftilde), thr.T_max);
  check_data_power(cfg, ch, bf, s.zeta);
  s.tau = thr.T_max;
  return s;
}

}  // namespace semifl
