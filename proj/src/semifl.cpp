#include "semifl/semifl.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace semifl {

namespace {

enum Stream : std::uint64_t {
  kData = 0x4441,
  kTest = 0x5445,
  kPartition = 0x5041,
  kInit = 0x494e,
  kChannel = 0x4348,
  kCsi = 0x4353,
  kSplit = 0x5350,
  kNoise = 0x4e4f,
};

}  // namespace

MixWeights mix_weights(const Eigen::VectorXd& theta) {
  require(theta.size() > 0, "empty theta");
  MixWeights m;
  m.rhoE = theta.mean();
  m.rhoL = 1 - m.rhoE;
  return m;
}

ModelSplit round_update(const ModelSplit& m, const Eigen::VectorXd& gL, const Eigen::VectorXd& gE,
                        const Eigen::VectorXd& theta, double eta) {
  const Index q2 = m.w.size() - m.q1;
  require(gL.size() == m.w.size() && gE.size() == q2, "gradient dimensions do not match the model split");
  MixWeights mw = mix_weights(theta);
  ModelSplit out = m;
  out.shallow() -= eta * gL.head(m.q1);
  out.deep() -= eta * (mw.rhoL * gL.tail(q2) + mw.rhoE * gE);
  return out;
}

double ls_slope(std::span<const double> y) {
  const double n = static_cast<double>(y.size());
  require(y.size() >= 2, "slope needs at least two points");
  double xm = (n - 1) / 2, ym = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    double dx = static_cast<double>(i) - xm;
    sxy += dx * (y[i] - ym);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

void RegionDetector::validate() const {
  require(window >= 2, "detector window must be >= 2");
  require(patience >= 1, "detector patience must be >= 1");
  require(slope_threshold >= 0, "slope threshold must be nonnegative");
}

Region RegionDetector::detect(std::span<const double> losses) const {
  int run = 0;
  for (std::size_t end = static_cast<std::size_t>(window); end <= losses.size(); ++end) {
    double s = ls_slope(losses.subspan(end - window, window));
    run = std::abs(s) < slope_threshold ? run + 1 : 0;
    if (run >= patience) return Region::Stable;
  }
  return Region::NonStable;
}

const char* region_mode_name(RegionMode m) {
  switch (m) {
    case RegionMode::TwoRegion: return "two_region";
    case RegionMode::NonStableOnly: return "ns_only";
    case RegionMode::StableOnly: return "s_only";
  }
  return "two_region";
}

RegionMode parse_region_mode(const std::string& s) {
  for (auto m : {RegionMode::TwoRegion, RegionMode::NonStableOnly, RegionMode::StableOnly}) {
    if (s == region_mode_name(m)) return m;
  }
  fail(ErrorCode::ConfigError, "unknown region mode '" + s + "'");
}

const char* aggregation_name(AggregationMode m) { return m == AggregationMode::Parameter ? "parameter" : "gradient"; }

AggregationMode parse_aggregation(const std::string& s) {
  if (s == "gradient") return AggregationMode::Gradient;
  if (s == "parameter") return AggregationMode::Parameter;
  fail(ErrorCode::ConfigError, "unknown aggregation mode '" + s + "'");
}

const char* allocation_solver_name(AllocationSolver s) { return s == AllocationSolver::Bcd ? "bcd" : "warm_start"; }

AllocationSolver parse_allocation_solver(const std::string& s) {
  if (s == "bcd") return AllocationSolver::Bcd;
  if (s == "warm_start") return AllocationSolver::WarmStart;
  fail(ErrorCode::ConfigError, "unknown allocation solver '" + s + "'");
}

void SemiflConfig::validate() const {
  net.validate();
  thr.validate();
  solver.validate();
  learner.validate();
  detector.validate();
  aggregation_noise().validate();
  require(rounds >= 1, "rounds must be >= 1");
  require(eta > 0 && (!eta_stable || *eta_stable > 0), "learning rates must be positive");
  require(csi_error >= 0, "csi_error must be nonnegative");
  require(test_per_class >= 1, "test_per_class must be >= 1");
  if (fixed_theta) {
    require(fixed_theta->size() == net.K, "fixed_theta needs one entry per device");
    require(fixed_theta->minCoeff() >= 0 && fixed_theta->maxCoeff() <= 1, "fixed_theta entries must lie in [0, 1]");
  }
}

namespace {

Dataset select(const Dataset& d, const std::vector<Index>& idx) {
  Dataset out;
  out.n_classes = d.n_classes;
  out.X.resize(idx.size(), d.X.cols());
  out.y.resize(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    out.X.row(i) = d.X.row(idx[i]);
    out.y[i] = d.y[idx[i]];
  }
  return out;
}

struct RoundAllocation {
  Allocation alloc;
  CostBreakdown costs;
};

RoundAllocation allocate(const SemiflConfig& cfg, const NetworkConfig& net, const ChannelRealization& ch,
                         Region region, std::uint64_t seed, int t) {
  BcdRequest req;
  req.region = region;
  req.kind = cfg.allocator;
  req.seed = seed ^ (static_cast<std::uint64_t>(t) * 0x9E3779B97F4A7C15ULL);
  req.theta_fixed = cfg.fixed_theta;
  RoundAllocation r;
  if (cfg.allocation_solver == AllocationSolver::Bcd) {
    BcdResult b = run_bcd(req, net, ch, cfg.thr, cfg.theory, cfg.solver);
    r.alloc = b.alloc;
    r.costs = b.costs;
  } else {
    r.alloc = initial_allocation(req, net, ch, cfg.thr, cfg.theory, cfg.solver);
    r.costs = compute_costs(net, ch, r.alloc);
  }
  return r;
}

// Local sum-form gradient rescaled to D samples so that FL and SL estimates share one scale.
Eigen::VectorXd scaled_local_gradient(const Learner& L, const Eigen::VectorXd& w, const Dataset& pool,
                                      const std::vector<Index>& idx, int D) {
  if (idx.empty()) return Eigen::VectorXd::Zero(L.dim());
  return L.local_gradient(w, pool, idx) * (static_cast<double>(D) / static_cast<double>(idx.size()));
}

}  // namespace

ChannelRealization round_channels(const SemiflConfig& cfg, std::uint64_t seed, int t) {
  Rng ch_rng = make_rng(seed, kChannel, static_cast<std::uint64_t>(t));
  ChannelRealization ch = sample_channels(cfg.net, cfg.fading, ch_rng);
  if (cfg.csi_error > 0) {
    Rng csi_rng = make_rng(seed, kCsi, static_cast<std::uint64_t>(t));
    apply_csi_error(ch, cfg.csi_error, csi_rng);
  }
  return ch;
}

PreparedData prepare_data(const SemiflConfig& cfg, const Learner& L, std::uint64_t seed) {
  const int K = cfg.net.K, D = cfg.net.D, C = L.n_classes();
  PreparedData out;
  Rng data_rng = make_rng(seed, kData);
  // dirichlet draws may take a whole device's data from one class
  const bool iid = cfg.partition.scheme == PartitionSpec::Scheme::Iid || std::isinf(cfg.partition.alpha);
  const Index per_class = iid ? static_cast<Index>(K) * D / C + K : static_cast<Index>(K) * D;
  out.pool = L.generate(per_class, data_rng);
  Rng test_rng = make_rng(seed, kTest);
  out.test = L.generate(cfg.test_per_class, test_rng);
  Rng part_rng = make_rng(seed, kPartition);
  out.partition = partition_data(out.pool.y, C, K, D, cfg.partition, part_rng);
  std::vector<Index> used;
  for (const auto& v : out.partition.indices) used.insert(used.end(), v.begin(), v.end());
  out.train = select(out.pool, used);
  return out;
}

Trajectory run_semifl(const SemiflConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  auto learner = make_learner(cfg.learner, seed);
  const Learner& L = *learner;
  NetworkConfig net = cfg.net;
  net.Q = static_cast<long>(L.dim());
  net.Q1 = static_cast<long>(L.shallow_dim());
  const int K = net.K, D = net.D;

  PreparedData data = prepare_data(cfg, L, seed);
  const Dataset& pool = data.pool;
  const Dataset& train = data.train;
  const Dataset& test = data.test;
  const DataPartition& part = data.partition;

  Rng init_rng = make_rng(seed, kInit);
  ModelSplit model{L.initial_model(init_rng), L.shallow_dim()};
  const Index q2 = L.deep_dim();

  Trajectory traj;
  traj.delta_d = heterogeneity_delta(part);
  traj.initial_loss = L.loss(model.w, train);
  std::vector<double> history{traj.initial_loss};
  const NoiseModel noise = cfg.aggregation_noise();

  for (int t = 1; t <= cfg.rounds; ++t) {
    Region region = cfg.region_mode == RegionMode::StableOnly      ? Region::Stable
                    : cfg.region_mode == RegionMode::NonStableOnly ? Region::NonStable
                                                                   : cfg.detector.detect(history);
    ChannelRealization ch = round_channels(cfg, seed, t);

    RoundAllocation ra;
    try {
      ra = allocate(cfg, net, ch, region, seed, t);
    } catch (Error& e) {
      e.round = t;
      throw;
    }
    const Eigen::VectorXd& theta = ra.alloc.theta;
    MixWeights mw = mix_weights(theta);
    double eta = region == Region::Stable ? cfg.eta_stable.value_or(cfg.eta) : cfg.eta;

    // Per-round SL/local split of every device's data.
    Rng split_rng = make_rng(seed, kSplit, t);
    std::vector<std::vector<Index>> local(K);
    std::vector<Index> sl_all;
    for (int k = 0; k < K; ++k) {
      std::vector<Index> idx = part.indices[k];
      std::shuffle(idx.begin(), idx.end(), split_rng);
      auto n_sl = static_cast<std::size_t>(std::llround(theta[k] * static_cast<double>(idx.size())));
      sl_all.insert(sl_all.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_sl));
      local[k].assign(idx.begin() + static_cast<std::ptrdiff_t>(n_sl), idx.end());
    }

    Eigen::VectorXd gE = Eigen::VectorXd::Zero(q2);
    if (!sl_all.empty()) {
      Eigen::MatrixXd Z = L.intermediate(model.shallow(), pool, sl_all);
      std::vector<int> labels(sl_all.size());
      for (std::size_t i = 0; i < sl_all.size(); ++i) labels[i] = pool.y[sl_all[i]];
      gE = L.edge_gradient(model.deep(), Z, labels) *
           (static_cast<double>(D) / static_cast<double>(sl_all.size()));
    }

    // an overflowing gradient ends the run as divergence instead of a normalization error
    bool blown = !gE.allFinite();
    std::vector<Eigen::VectorXd> ghat(K);
    std::vector<NormalizationStats> stats(K);
    for (int k = 0; k < K && !blown; ++k) {
      Eigen::VectorXd g = scaled_local_gradient(L, model.w, pool, local[k], D);
      if (cfg.aggregation == AggregationMode::Parameter) g = model.w - eta * g;
      if (!g.allFinite()) {
        blown = true;
        break;
      }
      NormalizedGradient n = normalize_gradient(g);
      ghat[k] = std::move(n.ghat);
      stats[k] = n.stats;
    }
    if (blown) {
      model.w.setConstant(std::numeric_limits<double>::quiet_NaN());
    } else {
      Rng noise_rng = make_rng(seed, kNoise, t);
      Eigen::VectorXd agg = aggregate_over_air(ghat, ra.alloc.bf, ch, ra.alloc.sf, noise, noise_rng);
      Eigen::VectorXd rec = denormalize_aggregate(agg, stats);
      if (cfg.aggregation == AggregationMode::Gradient) {
        model = round_update(model, rec, gE, theta, eta);
      } else {
        Eigen::VectorXd deep_sl = model.deep() - eta * gE;
        model.shallow() = rec.head(model.q1);
        model.deep() = mw.rhoL * rec.tail(q2) + mw.rhoE * deep_sl;
      }
    }

    RoundRecord r;
    r.round = t;
    r.region = region;
    r.nu = ra.alloc.sf.nu;
    r.omega = ra.alloc.sf.omega;
    r.mse = mse_closed_form(K, r.omega, r.nu, net.sigma2);
    r.mean_theta = theta.mean();
    r.E_uplink = ra.costs.E_uplink();
    r.E_compute = ra.costs.E_compute();
    r.E_total = ra.costs.E_all;
    r.T_total = ra.costs.T_all;
    bool finite = model.w.allFinite();
    r.loss = finite ? L.loss(model.w, train) : std::numeric_limits<double>::infinity();
    r.accuracy = finite ? L.accuracy(model.w, test) : std::numeric_limits<double>::quiet_NaN();
    traj.energy_uplink += r.E_uplink;
    traj.energy_compute += r.E_compute;
    traj.rounds.push_back(r);
    history.push_back(r.loss);
    if (traj.rounds_to_threshold < 0 && r.loss <= cfg.loss_threshold) traj.rounds_to_threshold = t;
    if (!std::isfinite(r.loss)) {
      traj.diverged = true;
      break;
    }
  }
  return traj;
}

}  // namespace semifl
