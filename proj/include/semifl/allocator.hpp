#pragma once

#include "semifl/costs.hpp"
#include "semifl/theory.hpp"

#include <optional>

namespace semifl {

struct RegionThresholds {
  double eps1 = 5.0;
  double eps2 = 2.0;
  double eps3 = 1.0;
  double eps4 = 0.01;
  double theta_max = 0.3;
  double theta_min = 0.2;
  double T_max = 1000.0;

  void validate() const;
  double box_lo(Region r) const { return r == Region::Stable ? theta_min : 0.0; }
  double box_hi(Region r) const { return r == Region::Stable ? 1.0 : theta_max; }
};

// Matrix space the beamformer SDPs are posed in. RealComposite is the 2N x 2N real form built by
// build_H_matrices; Hermitian is the equivalent N x N complex form.
enum class SdpField { Hermitian, RealComposite };

// LatencySplit: convex warm start over (theta, data-path budget); BoxMid: theta at the box middle
// with capped frequencies.
enum class InitStrategy { LatencySplit, BoxMid };

struct SolverOptions {
  double beta = 1.0;
  int dc_max_iter = 60;     // N1
  int bcd_max_iter = 10;    // N2 / N3
  double tol_obj = 1e-9;
  double tol_rank = 1e-7;
  int inner_max_iter = 4000;
  double inner_fail_gap = 1e-5;  // relative certified gap that counts as inner failure
  double lp_tol = 1e-9;
  bool sdr_warm_start = true;
  SdpField field = SdpField::Hermitian;
  InitStrategy init = InitStrategy::LatencySplit;

  void validate() const;
};

enum class AllocatorKind { Proposed, MmseCi, MaxTp, MaxCpu, Rda, Sdr };

const char* allocator_name(AllocatorKind k);
AllocatorKind parse_allocator(const std::string& s);

struct DerivedConstants {
  Eigen::VectorXd C1, C2, C3, C4;
  double C5 = 0, C6 = 0, C7 = 0, C8 = 0;
  Eigen::VectorXd C9;
  double C10 = 0;
  Eigen::VectorXd C11;
  double C12 = 0;
  Eigen::VectorXd C13;
  double C14 = 0;
  Eigen::VectorXd C15, C16;
  double C17 = 0;
  Eigen::VectorXd C18;
  double C19 = 0, C20 = 0, C21 = 0, C22 = 0, C23 = 0;
};

DerivedConstants derive_constants(const NetworkConfig& cfg, const ChannelRealization& ch, const RegionThresholds& thr,
                                  const AssumptionConstants& ac, const Allocation& a);

// p_max * min_k |b^H hG_k|^2
double power_cap_omega(const NetworkConfig& cfg, const ChannelRealization& ch, const Eigen::VectorXcd& b);

struct ScalingSolution {
  double nu = 0, omega = 0;
  Eigen::VectorXd zeta;
  double tau = 0;
};

// Data-uplink factor meeting T_D,k + T_E = T_max.
Eigen::VectorXd zeta_closed_form(const NetworkConfig& cfg, const Eigen::VectorXd& theta, double T_E, double T_max);

ScalingSolution solve_scaling_ns(const NetworkConfig& cfg, const ChannelRealization& ch, const RegionThresholds& thr,
                                 const Beamformers& bf, const Eigen::VectorXd& theta, double ftilde);

ScalingSolution solve_scaling_s(const NetworkConfig& cfg, const ChannelRealization& ch, const RegionThresholds& thr,
                                const AssumptionConstants& ac, const Beamformers& bf, const Eigen::VectorXd& theta,
                                double ftilde);

// Real composite matrix with tr(x x^T H) = |b^H h|^2 for x = [Re b; Im b].
Eigen::MatrixXd build_H_matrices(const Eigen::VectorXcd& h);
Eigen::VectorXd real_composite(const Eigen::VectorXcd& b);
Eigen::VectorXcd from_real_composite(const Eigen::VectorXd& x);

// Receive-beamformer subproblem:
//   min sum_k C9_k/|v_k^H hD_k|^2 + sum_k C10/|b^H hG_k|^2
//   s.t. p_max |v_k^H hD_k|^2 >= zeta_k, p_max |b^H hG_k|^2 >= omega, unit norms.
struct BeamformerProblem {
  std::vector<Eigen::VectorXcd> hG, hD;
  Eigen::VectorXd C9;
  double C10 = 0;
  Eigen::VectorXd zeta;
  double omega = 0;
  double p_max = 1;
};

double beamformer_objective(const BeamformerProblem& p, const Beamformers& bf);
// Smallest relative power-constraint slack (negative = violated).
double beamformer_slack(const BeamformerProblem& p, const Beamformers& bf);

struct BeamformerResult {
  Beamformers bf;
  double objective = 0;
  double relaxation_value = 0;          // certified lower bound of the relaxation (SDR only)
  std::vector<double> penalized_trace;  // normalized penalized objective per DC iteration
  double rank_gap = 0;                  // max over blocks of tr(W) - |W|_2 at termination
  int iterations = 0;
  bool kept_start = false;
};

BeamformerResult dc_beamformers(const BeamformerProblem& p, const Beamformers& start, const SolverOptions& opts);
BeamformerResult sdr_beamformers(const BeamformerProblem& p, const Beamformers& start, const SolverOptions& opts);

struct CpuSolution {
  Eigen::VectorXd fhat;
  double ftilde = 0;
  double tau = 0;
};

CpuSolution solve_cpu(const NetworkConfig& cfg, const Eigen::VectorXd& theta, const Eigen::VectorXd& T_D, double T_G,
                      double T_max);

struct DataAllocation {
  Eigen::VectorXd theta;
  double tau = 0;
  double objective = 0;  // sum C15_k theta_k
};

DataAllocation solve_data_allocation(Region region, const NetworkConfig& cfg, const ChannelRealization& ch,
                                     const RegionThresholds& thr, const Allocation& a, double lp_tol = 1e-9);

// Which block a heuristic holds fixed in the warm start.
enum class Pinned { None, Power, Frequency, Theta };

struct WarmStart {
  Eigen::VectorXd theta;
  double data_budget = 0;  // common T_D,k budget; T_E = T_max - data_budget
  Eigen::VectorXd zeta;
  Eigen::VectorXd fhat;
  double ftilde = 0;
  double energy = 0;  // data + compute energy at the warm start
};

// Convex problem over theta and the data-path budget with ζ, f̂, f̃ eliminated at their
// latency-tight values; gains are |v_k^H hD_k|^2.
WarmStart latency_split_start(Region region, const NetworkConfig& cfg, const RegionThresholds& thr,
                              const Eigen::VectorXd& gain_D, Pinned pin, const Eigen::VectorXd* theta_fixed = nullptr);

struct BcdResult {
  Allocation alloc;
  CostBreakdown costs;
  std::vector<double> trace;  // E_all at the initial point and after each outer iteration
  int iterations = 0;
};

struct BcdRequest {
  Region region = Region::NonStable;
  AllocatorKind kind = AllocatorKind::Proposed;
  std::uint64_t seed = 0;                     // rda draws
  std::optional<Eigen::VectorXd> theta_fixed; // pins theta for any kind
  bool beamformer_step = true;                // false keeps matched filters (fast path)
};

Allocation initial_allocation(const BcdRequest& req, const NetworkConfig& cfg, const ChannelRealization& ch,
                              const RegionThresholds& thr, const AssumptionConstants& ac, const SolverOptions& opts);

BcdResult run_bcd(const BcdRequest& req, const NetworkConfig& cfg, const ChannelRealization& ch,
                  const RegionThresholds& thr, const AssumptionConstants& ac, const SolverOptions& opts);

Allocation baseline_allocation(AllocatorKind kind, Region region, const NetworkConfig& cfg,
                               const ChannelRealization& ch, const RegionThresholds& thr,
                               const AssumptionConstants& ac, const SolverOptions& opts, std::uint64_t seed);

}  // namespace semifl
