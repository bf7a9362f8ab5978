#include "semifl/allocator.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace semifl {

void RegionThresholds::validate() const {
  require(eps1 >= 1, "eps1 must be >= 1");
  require(eps2 > 0 && eps3 > 0 && eps4 > 0, "eps2, eps3, eps4 must be positive");
  require(eps4 < eps2, "eps4 must be below eps2");
  require(theta_max > 0 && theta_max < 1 && theta_min > 0 && theta_min < 1, "theta bounds must lie in (0, 1)");
  require(theta_min <= theta_max, "theta_min must not exceed theta_max");
  require(T_max > 0, "T_max must be positive");
}

void SolverOptions::validate() const {
  require(beta > 0, "beta must be positive");
  require(dc_max_iter >= 1 && bcd_max_iter >= 1 && inner_max_iter >= 1, "iteration budgets must be >= 1");
  require(tol_obj > 0 && tol_rank > 0 && lp_tol > 0 && inner_fail_gap > 0, "tolerances must be positive");
}

const char* allocator_name(AllocatorKind k) {
  switch (k) {
    case AllocatorKind::Proposed: return "proposed";
    case AllocatorKind::MmseCi: return "mmse_ci";
    case AllocatorKind::MaxTp: return "max_tp";
    case AllocatorKind::MaxCpu: return "max_cpu";
    case AllocatorKind::Rda: return "rda";
    case AllocatorKind::Sdr: return "sdr";
  }
  return "proposed";
}

AllocatorKind parse_allocator(const std::string& s) {
  for (auto k : {AllocatorKind::Proposed, AllocatorKind::MmseCi, AllocatorKind::MaxTp, AllocatorKind::MaxCpu,
                 AllocatorKind::Rda, AllocatorKind::Sdr}) {
    if (s == allocator_name(k)) return k;
  }
  fail(ErrorCode::ConfigError, "unknown allocator '" + s + "'");
}

double power_cap_omega(const NetworkConfig& cfg, const ChannelRealization& ch, const Eigen::VectorXcd& b) {
  double g = std::numeric_limits<double>::infinity();
  for (int k = 0; k < ch.K(); ++k) g = std::min(g, beam_gain(b, ch.hG[k]));
  return cfg.p_max * g;
}

namespace {

// zeta / log2(1 + zeta/sigma2), continuous at zeta = 0.
double zeta_per_rate(double zeta, double sigma2) {
  if (zeta == 0) return sigma2 * std::numbers::ln2;
  return zeta * std::numbers::ln2 / std::log1p(zeta / sigma2);
}

}  // namespace

DerivedConstants derive_constants(const NetworkConfig& cfg, const ChannelRealization& ch, const RegionThresholds& thr,
                                  const AssumptionConstants& ac, const Allocation& a) {
  const int K = cfg.K;
  const double inf = std::numeric_limits<double>::infinity();
  const double T_G = latency_gradient(cfg.Q, cfg.M, cfg.T_s);
  const double D = cfg.D;
  DerivedConstants c;
  c.C1.resize(K), c.C2.resize(K), c.C3.resize(K), c.C4.resize(K), c.C9.resize(K);
  c.C11.resize(K), c.C13.resize(K), c.C15.resize(K), c.C16.resize(K), c.C18.resize(K);
  double sum_theta = a.theta.sum();
  for (int k = 0; k < K; ++k) {
    double gD = beam_gain(a.bf.v[k], ch.hD[k]);
    double gG = beam_gain(a.bf.b, ch.hG[k]);
    double theta = a.theta[k];
    double zeta = a.sf.zeta[k];
    double log_term = std::log1p(zeta / cfg.sigma2) / std::numbers::ln2;
    c.C1[k] = D * cfg.Cbar * theta / (gD * cfg.B);
    c.C2[k] = T_G / gG;
    c.C3[k] = D * cfg.Cbar * theta / cfg.B;
    c.C4[k] = cfg.p_max * gD;
    c.C9[k] = D * cfg.Cbar * theta * zeta_per_rate(zeta, cfg.sigma2) / cfg.B;
    c.C13[k] = D * (1 - theta) * cfg.Chat[k];
    c.C11[k] = c.C13[k] * cfg.kappa_hat;
    c.C16[k] = log_term > 0 ? D * cfg.Cbar / (cfg.B * log_term) : inf;
    c.C15[k] = D * cfg.Cbar * zeta_per_rate(zeta, cfg.sigma2) / (cfg.B * gD) -
               D * cfg.Chat[k] * cfg.kappa_hat * a.fhat[k] * a.fhat[k] +
               D * cfg.Ctilde * cfg.kappa_tilde * a.ftilde * a.ftilde;
    c.C18[k] = a.fhat[k] > 0 ? cfg.Chat[k] * D / a.fhat[k] : inf;
  }
  c.C5 = power_cap_omega(cfg, ch, a.bf.b);
  c.C6 = thr.eps1;
  c.C7 = 1 - K * thr.eps2;
  c.C8 = K * cfg.sigma2 / 2;
  c.C10 = T_G * a.sf.omega;
  c.C14 = D * cfg.Ctilde * sum_theta;
  c.C12 = c.C14 * cfg.kappa_tilde;
  c.C17 = a.ftilde > 0 ? cfg.Ctilde * D / a.ftilde : inf;
  c.C19 = thr.theta_max;
  c.C20 = ac.A2 - thr.eps3 * ac.mu * (4 * ac.mu - ac.L) / ac.L;
  c.C21 = static_cast<double>(cfg.Q) * cfg.sigma2 / 2;
  c.C22 = 1 - thr.eps4 * K;
  c.C23 = thr.theta_min;
  return c;
}

}  // namespace semifl
