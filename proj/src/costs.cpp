#include "semifl/costs.hpp"

namespace semifl {

double total_latency(const CostBreakdown& c) {
  double t = 0;
  for (Index k = 0; k < c.T_D.size(); ++k) t = std::max(t, c.T_D[k] + c.T_E);
  for (Index k = 0; k < c.T_F.size(); ++k) t = std::max(t, c.T_F[k] + c.T_G);
  return t;
}

double total_energy(const CostBreakdown& c) { return c.E_G.sum() + c.E_D.sum() + c.E_F.sum() + c.E_E; }

CostBreakdown compute_costs(const NetworkConfig& cfg, const ChannelRealization& ch, const Allocation& a) {
  const int K = cfg.K;
  require(a.theta.size() == K && a.fhat.size() == K && a.sf.zeta.size() == K, "allocation size mismatch");
  require(static_cast<int>(a.bf.v.size()) == K && ch.K() == K, "beamformer/channel count mismatch");

  CostBreakdown c;
  c.T_G = latency_gradient(cfg.Q, cfg.M, cfg.T_s);
  c.T_D.resize(K);
  c.T_F.resize(K);
  c.E_G.resize(K);
  c.E_D.resize(K);
  c.E_F.resize(K);
  for (int k = 0; k < K; ++k) {
    c.E_G[k] = energy_gradient_upload(a.sf.omega, beam_gain(a.bf.b, ch.hG[k]), c.T_G);
    double rate = uplink_rate(a.sf.zeta[k], cfg.sigma2, cfg.B);
    c.T_D[k] = latency_data(cfg.D, a.theta[k], cfg.Cbar, rate);
    c.E_D[k] = energy_data(a.sf.zeta[k], beam_gain(a.bf.v[k], ch.hD[k]), cfg.D, a.theta[k], cfg.Cbar, rate);
    c.T_F[k] = latency_local(cfg.D, a.theta[k], cfg.Chat[k], a.fhat[k]);
    c.E_F[k] = energy_local(cfg.D, a.theta[k], cfg.Chat[k], cfg.kappa_hat, a.fhat[k]);
  }
  double sum_theta = a.theta.sum();
  c.T_E = latency_edge(cfg.D, sum_theta, cfg.Ctilde, a.ftilde);
  c.E_E = energy_edge(cfg.D, sum_theta, cfg.Ctilde, cfg.kappa_tilde, a.ftilde);
  c.T_all = total_latency(c);
  c.E_all = total_energy(c);
  return c;
}

}  // namespace semifl
