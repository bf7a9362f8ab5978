#include "semifl/allocator.hpp"

#include <sstream>

namespace semifl {

CpuSolution solve_cpu(const NetworkConfig& cfg, const Eigen::VectorXd& theta, const Eigen::VectorXd& T_D, double T_G,
                      double T_max) {
  require(theta.size() == cfg.K && T_D.size() == cfg.K, "theta/T_D size mismatch");
  if (!(T_max > T_G)) fail(ErrorCode::LatencyInfeasible, "T_max must exceed the gradient-upload latency T_G");
  double t_d = T_D.maxCoeff();
  if (!(T_max > t_d)) fail(ErrorCode::LatencyInfeasible, "T_max must exceed every data-upload latency T_D,k");

  CpuSolution s;
  s.fhat.resize(cfg.K);
  for (int k = 0; k < cfg.K; ++k) {
    s.fhat[k] = cfg.D * (1 - theta[k]) * cfg.Chat[k] / (T_max - T_G);
    if (s.fhat[k] > cfg.fhat_max * (1 + 1e-12)) {
      std::ostringstream os;
      os << "fhat*_" << k << " = " << s.fhat[k] << " exceeds fhat_max = " << cfg.fhat_max;
      fail(ErrorCode::FrequencyCapExceeded, os.str());
    }
  }
  s.ftilde = cfg.D * cfg.Ctilde * theta.sum() / (T_max - t_d);
  if (s.ftilde > cfg.ftilde_max * (1 + 1e-12)) {
    std::ostringstream os;
    os << "ftilde* = " << s.ftilde << " exceeds ftilde_max = " << cfg.ftilde_max;
    fail(ErrorCode::FrequencyCapExceeded, os.str());
  }
  s.tau = T_max;
  return s;
}

}  // namespace semifl
