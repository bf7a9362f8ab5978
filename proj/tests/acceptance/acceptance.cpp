// Acceptance run: one PASS/FAIL line per criterion. Pass criterion numbers as arguments to run a subset.

#include "semifl/experiment.hpp"
#include "support/fixtures.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <filesystem>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

using namespace semifl;
namespace fx = semifl::fixtures;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct MeanSe {
  double mean = 0, se = 0;
};

MeanSe mean_se(const std::vector<double>& x) {
  double m = 0;
  for (double v : x) m += v;
  m /= static_cast<double>(x.size());
  double s = 0;
  for (double v : x) s += (v - m) * (v - m);
  return {m, std::sqrt(s / static_cast<double>(x.size() - 1) / static_cast<double>(x.size()))};
}

std::vector<Eigen::VectorXd> normalized_gradients(int K, Index Q, Rng& rng) {
  std::vector<Eigen::VectorXd> out;
  std::normal_distribution<double> nd;
  for (int k = 0; k < K; ++k) {
    Eigen::VectorXd g(Q);
    for (Index q = 0; q < Q; ++q) g[q] = nd(rng);
    out.push_back(normalize_gradient(g).ghat);
  }
  return out;
}

double data_latency(const NetworkConfig& c, double theta, double zeta) {
  return c.D * theta * c.Cbar / (c.B * std::log2(1 + zeta / c.sigma2));
}

// ---- 1: aggregation MSE against the closed form ----

Outcome criterion1() {
  auto t0 = Clock::now();
  struct Tuple {
    int K;
    double ratio, sigma2, nu;
  };
  const Tuple tuples[] = {{2, 1.0, 1e-2, 1e-2}, {5, 4.0, 1e-3, 1e-3}, {10, 2.25, 1e-11, 1e-9}, {3, 1.44, 2e-3, 5e-4},
                          {8, 9.0, 0.5, 1.0}};
  const Index Q = 1000000;
  double worst = 0;
  int i = 0;
  for (const Tuple& t : tuples) {
    NetworkConfig net = fx::network(t.K, 4);
    ChannelRealization ch = fx::channels(net, 100 + i);
    Beamformers bf = matched_filter(ch);
    Rng rng = make_rng(100 + i, 1);
    auto g = normalized_gradients(t.K, Q, rng);
    Eigen::VectorXd ideal = Eigen::VectorXd::Zero(Q);
    for (const auto& x : g) ideal += x;
    ideal /= t.K;
    ScalingFactors sf{t.nu, t.ratio * t.ratio * t.nu, {}};
    Eigen::VectorXd out = aggregate_over_air(g, bf, ch, sf, NoiseModel::gaussian(t.sigma2), rng);
    double mc = (out - ideal).squaredNorm() / static_cast<double>(Q);
    double cf = mse_closed_form(t.K, sf.omega, sf.nu, t.sigma2);
    worst = std::max(worst, std::abs(mc - cf) / cf);
    ++i;
  }
  double secs = seconds_since(t0);
  return {worst <= 0.01 && secs < 30, fmt("max relative error %.4f over 5 tuples at 1e6 entries, %.1f s", worst, secs)};
}

// ---- 2: constraint tightness ----

Outcome criterion2() {
  double worst_mse = 0, worst_tau = 0, worst_cpu = 0, worst_s = -1;
  int solved = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    Rng rng = make_rng(seed, 200);
    std::uniform_real_distribution<double> u(0, 1);
    const int K = 2 + static_cast<int>(u(rng) * 11);
    NetworkConfig net = fx::network(K, 2 + static_cast<int>(u(rng) * 7));
    ChannelRealization ch = fx::channels(net, 200 + seed);
    Beamformers bf = matched_filter(ch);
    RegionThresholds thr;
    thr.eps1 = 1 + 9 * u(rng);
    thr.eps2 = fx::feasible_eps2(thr.eps1, K, 0.05 + 2 * u(rng));
    thr.eps4 = std::min(0.5 * thr.eps2, 1e-3 + 0.1 * u(rng));
    thr.eps3 = 0.5 + 1.5 * u(rng);
    const double ftilde = net.ftilde_max * (0.5 + 0.5 * u(rng));
    const double T_G = net.Q / net.M * net.T_s + (net.Q % net.M ? net.T_s : 0);

    Eigen::VectorXd theta(K);
    for (int k = 0; k < K; ++k) theta[k] = thr.theta_max * u(rng);
    ScalingSolution s = solve_scaling_ns(net, ch, thr, bf, theta, ftilde);
    worst_mse = std::max(worst_mse, std::abs(mse_closed_form(K, s.omega, s.nu, net.sigma2) - thr.eps2) / thr.eps2);
    const double T_E = net.D * theta.sum() * net.Ctilde / ftilde;
    Eigen::VectorXd T_D(K);
    double tau = 0;
    for (int k = 0; k < K; ++k) {
      T_D[k] = data_latency(net, theta[k], s.zeta[k]);
      tau = std::max(tau, T_D[k] + T_E);
    }
    worst_tau = std::max({worst_tau, std::abs(tau - thr.T_max) / thr.T_max, std::abs(s.tau - thr.T_max) / thr.T_max});

    CpuSolution cpu = solve_cpu(net, theta, T_D, T_G, thr.T_max);
    for (int k = 0; k < K; ++k) {
      double path = T_G + net.D * (1 - theta[k]) * net.Chat[k] / cpu.fhat[k];
      worst_cpu = std::max(worst_cpu, std::abs(path - thr.T_max) / thr.T_max);
    }
    double edge = T_D.maxCoeff() + net.D * theta.sum() * net.Ctilde / cpu.ftilde;
    worst_cpu = std::max(worst_cpu, std::abs(edge - thr.T_max) / thr.T_max);

    AssumptionConstants ac;
    ac.mu = 0.5 + 0.5 * u(rng);
    ac.L = ac.mu * (1 + 2.9 * u(rng));
    ac.A2 = 0.9 * u(rng) * thr.eps3 * ac.mu * (4 * ac.mu - ac.L) / ac.L;
    Eigen::VectorXd theta_s(K);
    for (int k = 0; k < K; ++k) theta_s[k] = thr.theta_min + (1 - thr.theta_min) * u(rng);
    ScalingSolution ss = solve_scaling_s(net, ch, thr, ac, bf, theta_s, ftilde);
    double mse_s = mse_closed_form(K, ss.omega, ss.nu, net.sigma2);
    double psi = ac.L / ac.mu / (4 * ac.mu - ac.L) * (ac.A2 + net.sigma2 * net.Q / (2 * ss.nu));
    worst_s = std::max({worst_s, mse_s - thr.eps4 * (1 + 1e-9), psi - thr.eps3 * (1 + 1e-9)});
    ++solved;
  }
  bool ok = solved == 100 && worst_mse <= 1e-9 && worst_tau <= 1e-9 && worst_cpu <= 1e-9 && worst_s <= 0;
  return {ok, fmt("100 instances: max rel |MSE-eps2| %.2e, |tau-Tmax| %.2e, cpu path %.2e; stable excess %.2e",
                  worst_mse, worst_tau, worst_cpu, worst_s)};
}

// ---- 3: feasibility law ----

Outcome criterion3() {
  const double eps1s[] = {1, 1.5, 2, 3, 5, 10, 20};
  const double eps2s[] = {0.25, 0.5, 1, 2, 5, 10, 20};
  const int Ks[] = {2, 4, 5, 10, 16, 17, 20};
  int cells = 0, wrong = 0, feasible = 0, budget_fail = 0;
  bool fig6 = false;
  for (double p_max : {dbm_to_watts(23.0), 1e-9}) {
    for (int K : Ks) {
      NetworkConfig net = fx::network(K, 4);
      net.p_max = p_max;
      ChannelRealization ch = fx::channels(net, 300 + K);
      Beamformers bf = matched_filter(ch);
      Eigen::VectorXd theta = Eigen::VectorXd::Constant(K, 0.1);
      double min_gain = std::numeric_limits<double>::infinity();
      for (int k = 0; k < K; ++k) min_gain = std::min(min_gain, fx::gain(bf.b, ch.hG[k]));
      const double T_E = net.D * theta.sum() * net.Ctilde / net.ftilde_max;
      for (double e1 : eps1s)
        for (double e2 : eps2s) {
          RegionThresholds thr;
          thr.eps1 = e1;
          thr.eps2 = e2;
          thr.eps4 = std::min(thr.eps4, 0.5 * e2);
          bool law = (e1 - 1) * (e1 - 1) < K * e2;
          bool budgets = false;
          if (law) {
            double nu = K * net.sigma2 / 2 / (K * e2 - (e1 - 1) * (e1 - 1));
            budgets = e1 * e1 * nu <= p_max * min_gain;
            for (int k = 0; k < K; ++k) {
              double zeta = net.sigma2 * (std::pow(2.0, net.D * net.Cbar * theta[k] / net.B / (thr.T_max - T_E)) - 1);
              budgets = budgets && zeta <= p_max * fx::gain(bf.v[k], ch.hD[k]);
            }
          }
          bool predicted = law && budgets;
          bool ok = true;
          ErrorCode code{};
          try {
            solve_scaling_ns(net, ch, thr, bf, theta, net.ftilde_max);
          } catch (const Error& e) {
            ok = false;
            code = e.code();
          }
          ++cells;
          if (ok != predicted) ++wrong;
          if (!ok && !law && code != ErrorCode::InfeasibleMse) ++wrong;
          if (!ok && law && code != ErrorCode::PowerBudgetExceeded) ++wrong;
          feasible += ok;
          budget_fail += law && !budgets;
          if (p_max > 1e-3 && K == 20 && e1 == 10 && e2 == 5) fig6 = ok;
        }
    }
  }
  return {wrong == 0 && fig6, fmt("%d cells, %d feasible, %d budget-limited, %d misclassified; eps1=10 eps2=5 K=20 %s",
                                  cells, feasible, budget_fail, wrong, fig6 ? "feasible" : "INFEASIBLE")};
}

// ---- 4: beamformer quality ----

Outcome criterion4() {
  auto t0 = Clock::now();
  SolverOptions opts;
  double worst_gap = 0, worst_rank = 0;
  int below_relax = 0, non_monotone = 0, infeasible = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    NetworkConfig net = fx::network(2, 2);
    ChannelRealization ch = fx::channels(net, 400 + seed);
    Rng rng = make_rng(seed, 400);
    std::uniform_real_distribution<double> u(0.5, 2.0), tight(0.1, 0.95);
    BeamformerProblem p;
    p.hG = ch.hG;
    p.hD = ch.hD;
    p.C9 = Eigen::Vector2d(u(rng), u(rng));
    p.C10 = u(rng);
    p.p_max = 1;
    double best_min = 0;
    Eigen::VectorXcd best_b;
    fx::sphere_grid_2(200, 400, [&](const Eigen::VectorXcd& b) {
      double m = std::min(fx::gain(b, p.hG[0]), fx::gain(b, p.hG[1]));
      if (m > best_min) best_min = m, best_b = b;
    });
    p.omega = tight(rng) * best_min;
    p.zeta = Eigen::Vector2d(0.5 * p.hD[0].squaredNorm(), 0.5 * p.hD[1].squaredNorm());

    double grid_b = std::numeric_limits<double>::infinity();
    fx::sphere_grid_2(400, 800, [&](const Eigen::VectorXcd& b) {
      double g0 = fx::gain(b, p.hG[0]), g1 = fx::gain(b, p.hG[1]);
      if (p.p_max * std::min(g0, g1) >= p.omega) grid_b = std::min(grid_b, p.C10 / g0 + p.C10 / g1);
    });
    // single-channel receive blocks: the matched filter is optimal
    double grid = grid_b + p.C9[0] / p.hD[0].squaredNorm() + p.C9[1] / p.hD[1].squaredNorm();

    // the solver wants a feasible start, as the previous BCD iterate is
    Beamformers start = matched_filter(ch);
    if (beamformer_slack(p, start) < 0) start.b = best_b;
    BeamformerResult dc = dc_beamformers(p, start, opts);
    BeamformerResult sdr = sdr_beamformers(p, start, opts);
    double dc_b = p.C10 / fx::gain(dc.bf.b, p.hG[0]) + p.C10 / fx::gain(dc.bf.b, p.hG[1]);
    worst_gap = std::max({worst_gap, std::abs(dc_b - grid_b) / grid_b, std::abs(dc.objective - grid) / grid});
    worst_rank = std::max(worst_rank, dc.rank_gap);
    if (dc.objective < sdr.relaxation_value * (1 - 1e-9)) ++below_relax;
    for (std::size_t t = 1; t < dc.penalized_trace.size(); ++t)
      if (dc.penalized_trace[t] > dc.penalized_trace[t - 1] * (1 + 1e-12)) ++non_monotone;
    if (beamformer_slack(p, dc.bf) < -1e-8) ++infeasible;
  }
  double secs = seconds_since(t0);
  bool ok = worst_gap <= 0.02 && below_relax == 0 && non_monotone == 0 && worst_rank <= 1e-6 && infeasible == 0 &&
            secs < 120;
  return {ok, fmt("50 instances: max gap to grid %.2e, below SDR bound %d, non-monotone steps %d, max rank gap %.1e, "
                  "infeasible %d, %.1f s",
                  worst_gap, below_relax, non_monotone, worst_rank, infeasible, secs)};
}

// ---- 5: BCD descent and baselines ----

Outcome criterion5() {
  auto t0 = Clock::now();
  SolverOptions opts;
  AssumptionConstants ac = fx::contractive();
  int runs = 0, rises = 0, violations = 0, dominated = 0;
  double mean_saving[3] = {0, 0, 0};
  const AllocatorKind kinds[] = {AllocatorKind::MaxTp, AllocatorKind::MaxCpu, AllocatorKind::Rda};
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    NetworkConfig net = fx::network(5, 4);
    ChannelRealization ch = fx::channels(net, 500 + seed);
    RegionThresholds thr;
    thr.eps1 = 3;
    thr.eps2 = 2;
    for (Region region : {Region::NonStable, Region::Stable}) {
      BcdRequest req;
      req.region = region;
      BcdResult r = run_bcd(req, net, ch, thr, ac, opts);
      ++runs;
      for (std::size_t t = 1; t < r.trace.size(); ++t)
        if (r.trace[t] > r.trace[t - 1] * (1 + 1e-12)) ++rises;
      const Allocation& a = r.alloc;
      bool bad = r.costs.T_all > thr.T_max * (1 + 1e-9);
      for (int k = 0; k < net.K; ++k) {
        bad = bad || a.sf.omega > net.p_max * fx::gain(a.bf.b, ch.hG[k]) * (1 + 1e-9);
        bad = bad || a.sf.zeta[k] > net.p_max * fx::gain(a.bf.v[k], ch.hD[k]) * (1 + 1e-9);
        bad = bad || a.fhat[k] > net.fhat_max * (1 + 1e-9);
        bad = bad || a.theta[k] < thr.box_lo(region) - 1e-9 || a.theta[k] > thr.box_hi(region) + 1e-9;
      }
      bad = bad || a.ftilde > net.ftilde_max * (1 + 1e-9);
      double mse = mse_closed_form(net.K, a.sf.omega, a.sf.nu, net.sigma2);
      if (region == Region::NonStable) {
        bad = bad || mse > thr.eps2 * (1 + 1e-9);
      } else {
        bad = bad || mse > thr.eps4 * (1 + 1e-9);
        bad = bad || thm2_gap(a.sf.nu, ac.L, ac.mu, ac.A2, net.sigma2, net.Q) > thr.eps3 * (1 + 1e-9);
      }
      violations += bad;
      for (int i = 0; i < 3; ++i) {
        Allocation b = baseline_allocation(kinds[i], region, net, ch, thr, ac, opts, seed);
        double Eb = compute_costs(net, ch, b).E_all;
        if (r.costs.E_all > Eb * (1 + 1e-9)) ++dominated;
        mean_saving[i] += (1 - r.costs.E_all / Eb) / 40;
      }
    }
  }
  double secs = seconds_since(t0);
  bool ok = rises == 0 && violations == 0 && dominated == 0;
  return {ok, fmt("%d runs: trace rises %d, violations %d, beaten by a baseline %d; mean saving vs MaxTP %.1f%%, "
                  "MaxCPU %.1f%%, RDA %.1f%%; %.1f s",
                  runs, rises, violations, dominated, 100 * mean_saving[0], 100 * mean_saving[1],
                  100 * mean_saving[2], secs)};
}

// ---- 6 and 7: bounds on the quadratic learner ----

struct QuadSetup {
  std::unique_ptr<Learner> learner;
  QuadraticObjective f;
  Index q1 = 0;
};

QuadSetup quadratic(double mu, double L, std::uint64_t seed) {
  LearnerSpec spec;
  spec.kind = LearnerKind::Quadratic;
  spec.features = 50;
  spec.shallow_features = 25;
  spec.mu = mu;
  spec.L = L;
  QuadSetup s;
  s.learner = make_learner(spec, seed);
  s.f = static_cast<const QuadraticLearner&>(*s.learner).objective();
  s.q1 = 25;
  return s;
}

Outcome criterion6() {
  auto t0 = Clock::now();
  const double mu = 1.0, L = 2.0;
  QuadSetup q = quadratic(mu, L, 6);
  Rng crng = make_rng(6, 600);
  const double R = 1.0;
  AssumptionConstants ac = estimate_constants(q.f, R, 20000, 0, crng);
  const double eps = std::sqrt(ac.A2) / std::sqrt(2 * mu) * 1.1;
  // w_t on the top eigen-direction at radius R: |grad F| = L R >= eps
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q.f.H);
  Eigen::VectorXd w_t = q.f.w_star + R * es.eigenvectors().col(49);
  Eigen::VectorXd grad = q.f.gradient(w_t);
  if (grad.norm() < eps) return {false, "start point does not satisfy |grad F| >= eps"};

  const int K = 5;
  NetworkConfig net = fx::network(K, 4);
  ChannelRealization ch = fx::channels(net, 6);
  Beamformers bf = matched_filter(ch);
  const double sigma2 = 1e-3, nu = 1.0;
  const double eta = 1 / (L * 5);  // effective step at most 1/L over the tested ratios
  std::vector<Eigen::VectorXd> g(K, grad);
  std::string detail;
  bool ok = true;
  for (double eps1 : {1.0, 2.0, 5.0}) {
    for (double rhoL : {0.7, 1.0}) {
      ScalingFactors sf{nu, eps1 * eps1 * nu, {}};
      Eigen::VectorXd theta = Eigen::VectorXd::Constant(K, 1 - rhoL);
      Rng rng = make_rng(6, 601, static_cast<std::uint64_t>(eps1 * 10 + rhoL * 100));
      std::vector<double> descent;
      for (int draw = 0; draw < 1000; ++draw) {
        Eigen::VectorXd agg = aggregate_over_air(g, bf, ch, sf, NoiseModel::gaussian(sigma2), rng);
        ModelSplit next = round_update(ModelSplit{w_t, q.q1}, agg, grad.tail(50 - q.q1), theta, eta);
        descent.push_back(q.f.value(w_t) - q.f.value(next.w));
      }
      MeanSe m = mean_se(descent);
      double bound = thm1_lower_bound(eta, mu, eps, ac.A2, eps1, rhoL, sigma2, 50, nu);
      bool pass = m.mean >= bound - 3 * m.se;
      ok = ok && pass;
      detail += fmt(" (%g,%g): %.4f vs %.4f%s;", eps1, rhoL, m.mean, bound, pass ? "" : " FAIL");
    }
  }
  double secs = seconds_since(t0);
  ok = ok && secs < 60;
  return {ok, fmt("mean descent vs bound at (eps1,rhoL):%s %.1f s", detail.c_str(), secs)};
}

Outcome criterion7() {
  const double mu = 1.0, L = 1.5;  // 4 mu > L, and eta = 1/mu keeps the iteration stable
  QuadSetup q = quadratic(mu, L, 7);
  const int K = 5, rounds = 5000, batches = 50;
  NetworkConfig net = fx::network(K, 4);
  ChannelRealization ch = fx::channels(net, 7);
  Beamformers bf = matched_filter(ch);
  const double sigma2 = 1e-2, eta = 1 / mu;
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(K);
  std::string detail;
  bool ok = true;
  double prev_avg = std::numeric_limits<double>::infinity(), prev_psi = prev_avg;
  for (double nu : {0.05, 5.0}) {
    Rng rng = make_rng(7, 700, static_cast<std::uint64_t>(nu * 100));
    Eigen::VectorXd w0(50);
    std::normal_distribution<double> nd;
    for (Index i = 0; i < 50; ++i) w0[i] = nd(rng);
    Eigen::VectorXd w = q.f.w_star + w0.normalized();
    std::vector<double> gaps;
    double radius = 0;
    ScalingFactors sf{nu, nu, {}};
    for (int t = 0; t < rounds; ++t) {
      Eigen::VectorXd grad = q.f.gradient(w);
      std::vector<Eigen::VectorXd> g(K, grad);
      Eigen::VectorXd agg = aggregate_over_air(g, bf, ch, sf, NoiseModel::gaussian(sigma2), rng);
      w = round_update(ModelSplit{w, q.q1}, agg, grad.tail(50 - q.q1), theta, eta).w;
      gaps.push_back(q.f.value(w));
      radius = std::max(radius, (w - q.f.w_star).norm());
    }
    // A2 over the region the trajectory visited
    Rng crng = make_rng(7, 701);
    AssumptionConstants ac = estimate_constants(q.f, radius, 20000, 0, crng);
    double psi = thm2_gap(nu, L, mu, ac.A2, sigma2, 50);
    std::vector<double> means;
    for (int b = 0; b < batches; ++b) {
      double s = 0;
      for (int t = b * rounds / batches; t < (b + 1) * rounds / batches; ++t) s += gaps[t];
      means.push_back(s / (rounds / batches));
    }
    MeanSe m = mean_se(means);
    bool pass = m.mean <= psi + 3 * m.se;
    ok = ok && pass && m.mean < prev_avg && psi < prev_psi;
    detail += fmt(" nu=%g: avg gap %.4g (se %.2g) vs psi %.4g%s;", nu, m.mean, m.se, psi, pass ? "" : " FAIL");
    prev_avg = m.mean;
    prev_psi = psi;
  }
  return {ok, fmt("%s gap and psi fall as nu grows: %s", detail.c_str(), ok ? "yes" : "check")};
}

// ---- 8 to 10: training trends on the logistic learner ----

SemiflConfig logistic_base() {
  SemiflConfig c;
  c.net.K = 10;
  c.net.N_r = 4;
  c.net.D = 200;
  c.net.Chat = spread_cycles(10);
  c.learner.kind = LearnerKind::Logistic;
  c.learner.features = 20;
  c.learner.shallow_features = 10;
  c.learner.separation = 3.0;
  c.thr.eps1 = 5;
  c.thr.eps2 = 20;
  c.eta = 3e-3;
  c.rounds = 100;
  c.test_per_class = 200;
  c.loss_threshold = 0.3;
  return c;
}

std::vector<Trajectory> run20(const SemiflConfig& c) {
  std::vector<Trajectory> out;
  for (std::uint64_t s = 1; s <= 20; ++s) out.push_back(run_semifl(c, s));
  return out;
}

double median_rounds(const std::vector<Trajectory>& runs) {
  std::vector<double> r;
  for (const auto& t : runs)
    r.push_back(t.rounds_to_threshold < 0 ? std::numeric_limits<double>::infinity() : t.rounds_to_threshold);
  return median(r);
}

double median_final(const std::vector<Trajectory>& runs) {
  std::vector<double> r;
  for (const auto& t : runs) r.push_back(t.final_loss());
  return median(r);
}

double median_initial(const std::vector<Trajectory>& runs) {
  std::vector<double> r;
  for (const auto& t : runs) r.push_back(t.initial_loss);
  return median(r);
}

Outcome criterion8() {
  auto t0 = Clock::now();
  SemiflConfig c5 = logistic_base(), c1 = c5, c300 = c5, ns = c5;
  c1.thr.eps1 = 1;
  c300.thr.eps1 = 300;
  c300.thr.eps2 = 1e4;  // keeps (eps1-1)^2 < K eps2
  ns.region_mode = RegionMode::NonStableOnly;
  auto r5 = run20(c5), r1 = run20(c1), r300 = run20(c300), rns = run20(ns);

  double m5 = median_rounds(r5), m1 = median_rounds(r1);
  int better = 0;
  for (int s = 0; s < 20; ++s) better += r5[s].final_loss() <= rns[s].final_loss();
  int reached = 0, rose = 0;
  for (const auto& t : r300) {
    reached += t.rounds_to_threshold >= 0;
    rose += t.diverged || t.final_loss() >= t.initial_loss;
  }
  double f300 = median_final(r300), i300 = median_initial(r300);
  bool accel = m5 < m1, two = better >= 16, fails = reached == 0 && f300 >= i300;
  return {accel && two && fails,
          fmt("median rounds to %.2g: eps1=5 %g vs eps1=1 %g; two-region <= ns-only final loss on %d/20 seeds; "
              "eps1=300: %d/20 reach the threshold, %d/20 end at or above their initial loss, median final %.3f vs "
              "initial %.3f; %.0f s",
              c5.loss_threshold, m5, m1, better, reached, rose, f300, i300, seconds_since(t0))};
}

Outcome criterion9() {
  auto t0 = Clock::now();
  SemiflConfig base = logistic_base();
  base.thr.eps1 = 1;
  base.loss_threshold = 0.2;
  base.partition.scheme = PartitionSpec::Scheme::Dirichlet;
  std::vector<double> dd, rounds;
  std::string detail;
  for (double alpha : {0.1, 1.0, std::numeric_limits<double>::infinity()}) {
    SemiflConfig c = base;
    c.partition.alpha = alpha;
    auto r = run20(c);
    std::vector<double> d;
    for (const auto& t : r) d.push_back(t.delta_d);
    dd.push_back(median(d));
    rounds.push_back(median_rounds(r));
    detail += fmt(" alpha=%g: delta_d %.3f, rounds %g;", alpha, dd.back(), rounds.back());
  }
  bool dd_ok = dd[0] > dd[1] && dd[1] > dd[2];
  bool rounds_ok = rounds[0] >= rounds[1] && rounds[1] >= rounds[2];
  return {dd_ok && rounds_ok,
          fmt("eps1=1, threshold 0.2, medians over 20 seeds:%s %.0f s", detail.c_str(), seconds_since(t0))};
}

Outcome criterion10() {
  auto t0 = Clock::now();
  SemiflConfig g = logistic_base(), p = g;
  p.aggregation = AggregationMode::Parameter;
  auto rg = run20(g), rp = run20(p);
  double mg = median_rounds(rg), fg = median_final(rg), fp = median_final(rp);
  bool ok = std::isfinite(mg) && fp >= 2 * fg;
  return {ok, fmt("eps1=5: gradient mode median rounds %g, final %.4f; parameter mode median final %.4g (ratio %.3g); "
                  "%.0f s",
                  mg, fg, fp, fp / fg, seconds_since(t0))};
}

// ---- 11: CLI determinism ----

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome criterion11() {
  namespace fs = std::filesystem;
  fs::path work = fs::temp_directory_path() / "semifl_acceptance_determinism";
  fs::remove_all(work);
  std::string detail;
  bool ok = true;
  for (const char* cfg : {SEMIFL_SOURCE_DIR "/configs/smoke.json", SEMIFL_SOURCE_DIR "/configs/eps1_sweep.json"}) {
    fs::path stem = fs::path(cfg).stem();
    std::string files[2];
    for (int i = 0; i < 2; ++i) {
      fs::path out = work / stem / std::to_string(i);
      std::string cmd = std::string("\"") + SEMIFL_CLI + "\" simulate --config \"" + cfg + "\" --seed 7 --rounds 20 --out \"" +
                        out.string() + "\" > /dev/null";
      if (std::system(cmd.c_str()) != 0) return {false, "simulate failed: " + cmd};
      files[i] = slurp(out / (stem.string() + ".csv"));
    }
    bool same = !files[0].empty() && files[0] == files[1];
    ok = ok && same;
    detail += fmt(" %s: %zu bytes %s;", stem.c_str(), files[0].size(), same ? "identical" : "DIFFER");
  }
  fs::remove_all(work);
  return {ok, "repeated simulate with seed 7:" + detail};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Outcome()>> criteria{criterion1, criterion2, criterion3, criterion4,
                                                       criterion5, criterion6, criterion7, criterion8,
                                                       criterion9, criterion10, criterion11};
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    int n = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(n)) continue;
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << "criterion " << n << " " << (o.pass ? "PASS" : "FAIL") << ": " << o.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
