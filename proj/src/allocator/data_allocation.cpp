#include "semifl/allocator.hpp"
#include "semifl/simplex.hpp"

#include <cmath>

namespace semifl {

DataAllocation solve_data_allocation(Region region, const NetworkConfig& cfg, const ChannelRealization& ch,
                                     const RegionThresholds& thr, const Allocation& a, double lp_tol) {
  AssumptionConstants unused{1, 1, 0, 0};
  DerivedConstants c = derive_constants(cfg, ch, thr, unused, a);
  const int K = cfg.K;
  const double T_G = latency_gradient(cfg.Q, cfg.M, cfg.T_s);

  // Infinite coefficients pin their variable; the LP only sees the finite part.
  Eigen::VectorXd lo = Eigen::VectorXd::Constant(K, thr.box_lo(region));
  Eigen::VectorXd hi = Eigen::VectorXd::Constant(K, thr.box_hi(region));
  bool edge_off = !std::isfinite(c.C17);
  for (int k = 0; k < K; ++k) {
    if (edge_off || !std::isfinite(c.C16[k])) hi[k] = std::min(hi[k], 0.0);
    if (!std::isfinite(c.C18[k])) lo[k] = std::max(lo[k], 1.0);
    if (lo[k] > hi[k]) fail(ErrorCode::LpInfeasible, "a device can neither compute locally nor offload");
  }
  if (!(thr.T_max >= T_G)) fail(ErrorCode::LpInfeasible, "T_max below the gradient-upload latency");

  LinearProgram lp(K);
  lp.c = c.C15;
  lp.lb = lo;
  lp.ub = hi;
  for (int k = 0; k < K; ++k) {
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(K);
    if (!edge_off) row.setConstant(c.C17);
    if (std::isfinite(c.C16[k])) row[k] += c.C16[k];
    if (row.cwiseAbs().maxCoeff() > 0) lp.add_le(row, thr.T_max);
    if (std::isfinite(c.C18[k]) && c.C18[k] > 0) {
      // T_G + C18 (1 - theta) <= T_max
      Eigen::RowVectorXd r2 = Eigen::RowVectorXd::Zero(K);
      r2[k] = -c.C18[k];
      lp.add_le(r2, thr.T_max - T_G - c.C18[k]);
    }
  }
  LpResult res = solve_lp(lp, lp_tol);
  DataAllocation out;
  out.theta = res.x.cwiseMax(lo).cwiseMin(hi);
  out.objective = c.C15.dot(out.theta);
  out.tau = thr.T_max;
  return out;
}

}  // namespace semifl
