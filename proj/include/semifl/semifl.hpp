#pragma once

#include "semifl/allocator.hpp"
#include "semifl/learners.hpp"

#include <limits>
#include <optional>

namespace semifl {

// ---- data partitioning ----

struct PartitionSpec {
  enum class Scheme { Iid, Dirichlet } scheme = Scheme::Iid;
  double alpha = std::numeric_limits<double>::infinity();  // dirichlet concentration; inf behaves as iid
};

struct DataPartition {
  std::vector<std::vector<Index>> indices;  // per device, into the pooled dataset
  Eigen::MatrixXd proportions;              // K x C realized class proportions
};

// Draws D samples per device from per-class pools (labels give the class of each pooled sample).
DataPartition partition_data(const Eigen::VectorXi& labels, int n_classes, int K, int D, const PartitionSpec& spec,
                             Rng& rng);

// sum_k sum_c (p_kc - 1/C)^2
double heterogeneity_delta(const DataPartition& p);
double heterogeneity_delta(const Eigen::MatrixXd& proportions);

// ---- round mechanics ----

struct ModelSplit {
  Eigen::VectorXd w;
  Index q1 = 0;

  auto shallow() { return w.head(q1); }
  auto deep() { return w.tail(w.size() - q1); }
  auto shallow() const { return w.head(q1); }
  auto deep() const { return w.tail(w.size() - q1); }
};

// rho_L = 1 - mean(theta), rho_E = mean(theta)
struct MixWeights {
  double rhoL = 1, rhoE = 0;
};
MixWeights mix_weights(const Eigen::VectorXd& theta);

// Shallow part moves with the aggregated FL gradient only; deep part with the rho-weighted mix.
ModelSplit round_update(const ModelSplit& m, const Eigen::VectorXd& gL, const Eigen::VectorXd& gE,
                        const Eigen::VectorXd& theta, double eta);

double ls_slope(std::span<const double> y);

struct RegionDetector {
  int window = 10;
  double slope_threshold = 1e-3;
  int patience = 3;

  // Stable once `patience` consecutive windows of the loss history had |slope| below the
  // threshold; the scan covers the whole history, so the flag never reverts.
  Region detect(std::span<const double> losses) const;
  void validate() const;
};

// ---- training loop ----

enum class RegionMode { TwoRegion, NonStableOnly, StableOnly };
enum class AggregationMode { Gradient, Parameter };
enum class AllocationSolver { Bcd, WarmStart };

const char* region_mode_name(RegionMode m);
RegionMode parse_region_mode(const std::string& s);
const char* aggregation_name(AggregationMode m);
AggregationMode parse_aggregation(const std::string& s);
const char* allocation_solver_name(AllocationSolver s);
AllocationSolver parse_allocation_solver(const std::string& s);

struct SemiflConfig {
  NetworkConfig net;
  RegionThresholds thr;
  AssumptionConstants theory{1.0, 0.6, 0.1, 0.0};
  SolverOptions solver;
  LearnerSpec learner;
  PartitionSpec partition;
  AllocatorKind allocator = AllocatorKind::Proposed;
  AllocationSolver allocation_solver = AllocationSolver::WarmStart;
  Fading fading;
  std::optional<NoiseModel> noise;  // aggregation noise; default gaussian with net.sigma2
  double csi_error = 0;             // estimation-error variance ratio; 0 = perfect CSI
  RegionMode region_mode = RegionMode::TwoRegion;
  AggregationMode aggregation = AggregationMode::Gradient;
  RegionDetector detector;
  int rounds = 100;
  double eta = 1e-3;
  std::optional<double> eta_stable;  // default: eta
  double loss_threshold = 0.3;
  int test_per_class = 500;
  std::optional<Eigen::VectorXd> fixed_theta;

  void validate() const;
  NoiseModel aggregation_noise() const { return noise ? *noise : NoiseModel::gaussian(net.sigma2); }
};

struct RoundRecord {
  int round = 0;
  Region region = Region::NonStable;
  double loss = 0;
  double accuracy = 0;
  double mse = 0;
  double nu = 0, omega = 0;
  double mean_theta = 0;
  double E_uplink = 0, E_compute = 0, E_total = 0, T_total = 0;
};

struct Trajectory {
  std::vector<RoundRecord> rounds;
  double initial_loss = 0;
  double delta_d = 0;
  bool diverged = false;
  int rounds_to_threshold = -1;  // first round whose loss is at or below the threshold
  double energy_uplink = 0, energy_compute = 0;

  double final_loss() const { return rounds.empty() ? initial_loss : rounds.back().loss; }
};

struct PreparedData {
  Dataset pool, train, test;  // train: the pooled samples the partition hands out
  DataPartition partition;
};

// Data generation and partitioning exactly as the start of run_semifl does them.
PreparedData prepare_data(const SemiflConfig& cfg, const Learner& learner, std::uint64_t seed);

// Channels of round t (with CSI error applied when configured); round 1 is what `optimize` uses.
ChannelRealization round_channels(const SemiflConfig& cfg, std::uint64_t seed, int t);

Trajectory run_semifl(const SemiflConfig& cfg, std::uint64_t seed);

}  // namespace semifl
