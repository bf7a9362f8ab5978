#include "semifl/theory.hpp"

#include <algorithm>

namespace semifl {

Cor2Result cor2_gap(double L, double mu, double A2, double sigma2, long Q, double nu, int C, int K,
                    const std::vector<double>& delta_d, const std::vector<double>& rhoL, int horizon) {
  require(mu > 0 && L > 0 && nu > 0 && K >= 1 && horizon >= 1, "invalid accumulated-gap inputs");
  require(!delta_d.empty() && !rhoL.empty(), "heterogeneity and rhoL sequences must be nonempty");
  Cor2Result r;
  r.contraction = L / mu - 1;
  if (std::abs(r.contraction) >= 1) fail(ErrorCode::NonContractive, "accumulated gap needs |L/mu - 1| < 1");
  r.first_term = L / mu / (2 * mu - L) * (A2 + sigma2 * static_cast<double>(Q) / (2 * nu));

  auto term = [&](int tau) {  // tau is 1-based
    double dd = delta_d[std::min<std::size_t>(tau - 1, delta_d.size() - 1)];
    double rl = rhoL[std::min<std::size_t>(tau - 1, rhoL.size() - 1)];
    return rl * rl * dd;
  };
  double s = 0, amax = 0;
  for (int tau = 1; tau <= horizon; ++tau) {
    double a = term(tau);
    s = r.contraction * s + a;
    amax = std::max(amax, std::abs(a));
  }
  double pre = L * A2 * C / (mu * mu * K);
  r.accumulation = pre * s;
  r.remainder_bound = pre * std::pow(std::abs(r.contraction), horizon) * amax / (1 - std::abs(r.contraction));
  r.value = r.first_term + r.accumulation;
  return r;
}

TwoRegionGap two_region_gap(int T_prime, double nu_low, double nu_high, double L, double mu, double A2,
                            double sigma2, long Q, double initial_gap, long t) {
  require(mu > 0 && L > 0 && nu_low > 0 && nu_high > 0, "invalid two-region inputs");
  require(T_prime >= 1 && t >= T_prime, "need 1 <= T' <= t");
  double xi = L / (2 * mu) - 1;
  if (std::abs(xi) >= 1) fail(ErrorCode::NonContractive, "two-region gap needs |L/(2mu) - 1| < 1");
  TwoRegionGap g;
  double c = L / (2 * mu * mu);
  double q = static_cast<double>(Q);
  double per_high = A2 + sigma2 * q / (2 * nu_high);
  double per_low = A2 + sigma2 * q / (2 * nu_low);
  g.limit = L / mu / (4 * mu - L) * per_high;
  g.initial = std::pow(xi, static_cast<double>(t - 1)) * initial_gap;
  double n_high = static_cast<double>(t - T_prime);
  g.high = c * per_high * (1 - std::pow(xi, n_high)) / (1 - xi);
  g.legacy = c * per_low * std::pow(xi, n_high) * (1 - std::pow(xi, T_prime - 1.0)) / (1 - xi);
  return g;
}

AssumptionConstants estimate_constants(const QuadraticObjective& f, double radius, int samples, double eps, Rng& rng) {
  const Index n = f.H.rows();
  require(n >= 1 && f.H.cols() == n && f.w_star.size() == n, "Hessian/minimizer size mismatch");
  require((f.H - f.H.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, f.H.cwiseAbs().maxCoeff()),
          "Hessian must be symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(f.H, Eigen::EigenvaluesOnly);
  double lmin = es.eigenvalues()[0];
  double lmax = es.eigenvalues()[n - 1];
  require(lmin > 0, "Hessian must be positive definite");
  AssumptionConstants c;
  c.L = lmax;
  c.mu = lmin;
  c.eps = eps;
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> ud;
  for (int s = 0; s < samples; ++s) {
    Eigen::VectorXd d(n);
    for (Index i = 0; i < n; ++i) d[i] = nd(rng);
    double r = radius * std::pow(ud(rng), 1.0 / static_cast<double>(n));
    Eigen::VectorXd w = f.w_star + r * d.normalized();
    c.A2 = std::max(c.A2, f.gradient(w).squaredNorm());
  }
  return c;
}

}  // namespace semifl
