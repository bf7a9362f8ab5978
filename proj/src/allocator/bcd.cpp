#include "semifl/allocator.hpp"

#include <sstream>

namespace semifl {

namespace {

constexpr std::uint64_t kRdaStream = 0x524441;

bool theta_pinned(const BcdRequest& req) { return req.theta_fixed.has_value() || req.kind == AllocatorKind::Rda; }

Eigen::VectorXd pinned_theta(const BcdRequest& req, const NetworkConfig& cfg, const RegionThresholds& thr) {
  if (req.theta_fixed) {
    require(req.theta_fixed->size() == cfg.K, "theta_fixed size mismatch");
    require(req.theta_fixed->minCoeff() >= 0 && req.theta_fixed->maxCoeff() <= 1, "theta_fixed must lie in [0, 1]");
    return *req.theta_fixed;
  }
  Rng rng = make_rng(req.seed, kRdaStream);
  std::uniform_real_distribution<double> u(thr.box_lo(req.region), thr.box_hi(req.region));
  Eigen::VectorXd th(cfg.K);
  for (int k = 0; k < cfg.K; ++k) th[k] = u(rng);
  return th;
}

void check_region(Region region, const NetworkConfig& cfg, const RegionThresholds& thr, const AssumptionConstants& ac,
                  double nu, double omega) {
  double mse = mse_closed_form(cfg.K, omega, nu, cfg.sigma2);
  double target = region == Region::Stable ? thr.eps4 : thr.eps2;
  if (mse > target * (1 + 1e-12)) {
    std::ostringstream os;
    os << "MSE " << mse << " exceeds target " << target;
    fail(ErrorCode::InfeasibleMse, os.str());
  }
  if (region == Region::Stable) {
    double psi = thm2_gap(nu, ac.L, ac.mu, ac.A2, cfg.sigma2, cfg.Q);
    if (psi > thr.eps3 * (1 + 1e-12)) {
      std::ostringstream os;
      os << "gap bound " << psi << " exceeds eps3 = " << thr.eps3;
      fail(ErrorCode::GapInfeasible, os.str());
    }
  }
}

ScalingSolution scaling_step(const BcdRequest& req, const NetworkConfig& cfg, const ChannelRealization& ch,
                             const RegionThresholds& thr, const AssumptionConstants& ac, const Beamformers& bf,
                             const Eigen::VectorXd& theta, double ftilde) {
  const double T_E = latency_edge(cfg.D, theta.sum(), cfg.Ctilde, ftilde);
  if (req.kind == AllocatorKind::MmseCi) {
    ScalingSolution s;
    s.nu = s.omega = power_cap_omega(cfg, ch, bf.b);
    check_region(req.region, cfg, thr, ac, s.nu, s.omega);
    s.zeta = zeta_closed_form(cfg, theta, T_E, thr.T_max);
    for (int k = 0; k < cfg.K; ++k) {
      if (s.zeta[k] > cfg.p_max * beam_gain(bf.v[k], ch.hD[k]) * (1 + 1e-12))
        fail(ErrorCode::PowerBudgetExceeded, "data-uplink power cap exceeded");
    }
    s.tau = thr.T_max;
    return s;
  }
  if (req.kind == AllocatorKind::MaxTp) {
    ScalingSolution s;
    s.omega = power_cap_omega(cfg, ch, bf.b);
    s.nu = req.region == Region::Stable ? s.omega : s.omega / (thr.eps1 * thr.eps1);
    check_region(req.region, cfg, thr, ac, s.nu, s.omega);
    s.zeta.resize(cfg.K);
    for (int k = 0; k < cfg.K; ++k) s.zeta[k] = cfg.p_max * beam_gain(bf.v[k], ch.hD[k]);
    s.tau = thr.T_max;
    return s;
  }
  if (req.region == Region::Stable) return solve_scaling_s(cfg, ch, thr, ac, bf, theta, ftilde);
  return solve_scaling_ns(cfg, ch, thr, bf, theta, ftilde);
}

void apply(Allocation& a, const ScalingSolution& s) {
  a.sf.nu = s.nu;
  a.sf.omega = s.omega;
  a.sf.zeta = s.zeta;
}

bool within_latency(const CostBreakdown& c, double T_max) { return c.T_all <= T_max * (1 + 1e-9); }

}  // namespace

Allocation initial_allocation(const BcdRequest& req, const NetworkConfig& cfg, const ChannelRealization& ch,
                              const RegionThresholds& thr, const AssumptionConstants& ac, const SolverOptions& opts) {
  cfg.validate();
  thr.validate();
  opts.validate();
  require(ch.K() == cfg.K, "channel count must equal K");
  Allocation a;
  a.bf = matched_filter(ch);
  Eigen::VectorXd gain_D(cfg.K);
  for (int k = 0; k < cfg.K; ++k) gain_D[k] = beam_gain(a.bf.v[k], ch.hD[k]);

  Pinned pin = Pinned::None;
  Eigen::VectorXd th_fixed;
  if (theta_pinned(req)) {
    pin = Pinned::Theta;
    th_fixed = pinned_theta(req, cfg, thr);
  } else if (req.kind == AllocatorKind::MaxTp) {
    pin = Pinned::Power;
  } else if (req.kind == AllocatorKind::MaxCpu) {
    pin = Pinned::Frequency;
  }

  if (opts.init == InitStrategy::LatencySplit) {
    WarmStart w = latency_split_start(req.region, cfg, thr, gain_D, pin, pin == Pinned::Theta ? &th_fixed : nullptr);
    a.theta = w.theta;
    a.fhat = w.fhat;
    a.ftilde = w.ftilde;
  } else {
    a.theta = pin == Pinned::Theta
                  ? th_fixed
                  : Eigen::VectorXd::Constant(cfg.K, 0.5 * (thr.box_lo(req.region) + thr.box_hi(req.region)));
    a.fhat = Eigen::VectorXd::Constant(cfg.K, cfg.fhat_max);
    a.ftilde = cfg.ftilde_max;
  }
  if (req.kind == AllocatorKind::MaxCpu) {
    a.fhat.setConstant(cfg.fhat_max);
    a.ftilde = cfg.ftilde_max;
  }
  apply(a, scaling_step(req, cfg, ch, thr, ac, a.bf, a.theta, a.ftilde));
  return a;
}

BcdResult run_bcd(const BcdRequest& req, const NetworkConfig& cfg, const ChannelRealization& ch,
                  const RegionThresholds& thr, const AssumptionConstants& ac, const SolverOptions& opts) {
  BcdResult r;
  r.alloc = initial_allocation(req, cfg, ch, thr, ac, opts);
  r.costs = compute_costs(cfg, ch, r.alloc);
  if (!within_latency(r.costs, thr.T_max)) {
    std::ostringstream os;
    os << "initial allocation latency " << r.costs.T_all << " exceeds T_max = " << thr.T_max;
    fail(ErrorCode::NoFeasibleStart, os.str());
  }
  r.trace.push_back(r.costs.E_all);
  const double T_G = latency_gradient(cfg.Q, cfg.M, cfg.T_s);

  // Accepts a candidate only when it keeps the latency budget and does not raise E_all.
  auto consider = [&](const Allocation& cand) {
    CostBreakdown c = compute_costs(cfg, ch, cand);
    if (within_latency(c, thr.T_max) && c.E_all <= r.costs.E_all * (1 + 1e-12)) {
      r.alloc = cand;
      r.costs = c;
      return true;
    }
    return false;
  };

  for (int it = 1; it <= opts.bcd_max_iter; ++it) {
    const double E_prev = r.costs.E_all;
    try {
      {
        Allocation cand = r.alloc;
        apply(cand, scaling_step(req, cfg, ch, thr, ac, cand.bf, cand.theta, cand.ftilde));
        consider(cand);
      }
      if (req.beamformer_step) {
        DerivedConstants dc = derive_constants(cfg, ch, thr, ac, r.alloc);
        BeamformerProblem p;
        p.hG = ch.hG;
        p.hD = ch.hD;
        p.C9 = dc.C9;
        p.C10 = dc.C10;
        p.zeta = r.alloc.sf.zeta;
        p.omega = r.alloc.sf.omega;
        p.p_max = cfg.p_max;
        BeamformerResult br = req.kind == AllocatorKind::Sdr ? sdr_beamformers(p, r.alloc.bf, opts)
                                                             : dc_beamformers(p, r.alloc.bf, opts);
        Allocation cand = r.alloc;
        cand.bf = br.bf;
        consider(cand);
      }
      if (req.kind != AllocatorKind::MaxCpu) {
        CpuSolution cs = solve_cpu(cfg, r.alloc.theta, r.costs.T_D, T_G, thr.T_max);
        Allocation cand = r.alloc;
        cand.fhat = cs.fhat;
        cand.ftilde = cs.ftilde;
        consider(cand);
      }
      if (!theta_pinned(req)) {
        DataAllocation da = solve_data_allocation(req.region, cfg, ch, thr, r.alloc, opts.lp_tol);
        Allocation cand = r.alloc;
        cand.theta = da.theta;
        consider(cand);
      }
    } catch (Error& e) {
      e.iteration = it;
      throw;
    }
    r.trace.push_back(r.costs.E_all);
    r.iterations = it;
    if (E_prev - r.costs.E_all <= opts.tol_obj * std::abs(E_prev)) break;
  }
  return r;
}

Allocation baseline_allocation(AllocatorKind kind, Region region, const NetworkConfig& cfg,
                               const ChannelRealization& ch, const RegionThresholds& thr,
                               const AssumptionConstants& ac, const SolverOptions& opts, std::uint64_t seed) {
  BcdRequest req;
  req.kind = kind;
  req.region = region;
  req.seed = seed;
  return run_bcd(req, cfg, ch, thr, ac, opts).alloc;
}

}  // namespace semifl
