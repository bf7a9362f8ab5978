#pragma once

#include "semifl/common.hpp"

#include <cmath>

namespace semifl {

struct AssumptionConstants {
  double L = 1.0;
  double mu = 1.0;
  double A2 = 0.0;
  double eps = 0.0;

  double xi() const { return L / (2 * mu) - 1; }
};

template <typename T>
T thm1_lower_bound(T eta, T mu, T eps, T A2, T ratio, T rhoL, T sigma2, long Q, T nu) {
  using std::sqrt;
  require(eps * eps * T(2) * mu >= A2 * T(1 - 1e-12), "descent bound needs eps >= sqrt(A2/(2 mu))");
  require(nu > T(0), "nu must be positive");
  require(rhoL >= T(0) && rhoL <= T(1), "rhoL must lie in [0, 1]");
  T bracket = T(1) + (ratio - T(1)) * rhoL;
  return eta * eta / T(4) * (T(2) * mu * eps * eps - A2) * bracket * bracket - A2 +
         mu * sigma2 * T(Q) * eta * eta * rhoL * rhoL / (T(4) * nu);
}

// sigma enters the noise term un-squared.
template <typename T>
T cor1_lower_bound(T eta, T mu, T eps, T A2, T ratio, T rhoL, T rhoE, T sigma, long Q, T nu, T omega, int C, int K,
                   T delta_d) {
  require(eps * eps * T(2) * mu >= A2 * T(1 - 1e-12), "heterogeneous descent bound needs eps >= sqrt(A2/(2 mu))");
  require(nu > T(0), "nu must be positive");
  require(delta_d >= T(0), "delta_d must be nonnegative");
  T mix = rhoL * ratio + rhoE;
  return mu * mu * eta * eta / T(2) * mix * mix * eps * eps + mu * sigma * T(Q) * eta * eta * rhoL * rhoL / (T(4) * nu) -
         A2 * T(C) / T(K) * rhoL * rhoL * delta_d -
         (eta * eta * omega / (T(4) * nu) + eta * eta / T(4) * mix * mix + T(1)) * A2;
}

template <typename T>
T thm2_gap(T nu, T L, T mu, T A2, T sigma2, long Q) {
  if (!(T(4) * mu > L)) fail(ErrorCode::NonContractive, "stable gap needs 4 mu > L");
  require(nu > T(0), "nu must be positive");
  return L / mu / (T(4) * mu - L) * (A2 + sigma2 * T(Q) / (T(2) * nu));
}

struct Cor2Result {
  double value = 0;          // first term + accumulation
  double first_term = 0;
  double accumulation = 0;   // (L A2 C / (mu^2 K)) * geometric sum
  double remainder_bound = 0;
  double contraction = 0;
};

// Geometric accumulation sum_{tau=1}^{t-1} xi^{t-1-tau} rhoL_tau^2 dd_tau with t-1 = horizon;
// sequences shorter than the horizon hold their last value.
Cor2Result cor2_gap(double L, double mu, double A2, double sigma2, long Q, double nu, int C, int K,
                    const std::vector<double>& delta_d, const std::vector<double>& rhoL, int horizon = 10000);

struct TwoRegionGap {
  double limit = 0;       // (L/mu)(1/(4mu-L))(A2 + sigma2 Q/(2 nu_high))
  double initial = 0;     // xi^{t-1} * gap at round 1
  double high = 0;        // rounds T'..t-1 at nu_high
  double legacy = 0;      // rounds 1..T'-1 at nu_low
  double partial() const { return initial + high + legacy; }
};

TwoRegionGap two_region_gap(int T_prime, double nu_low, double nu_high, double L, double mu, double A2,
                            double sigma2, long Q, double initial_gap, long t);

struct QuadraticObjective {
  Eigen::MatrixXd H;       // Hessian of F
  Eigen::VectorXd w_star;  // minimizer

  double value(const Eigen::VectorXd& w) const {
    Eigen::VectorXd e = w - w_star;
    return 0.5 * e.dot(H * e);
  }
  Eigen::VectorXd gradient(const Eigen::VectorXd& w) const { return H * (w - w_star); }
};

// A2 from the max of |grad F|^2 over `samples` points drawn uniformly in the ball of `radius`
// around the minimizer; eps is passed through.
AssumptionConstants estimate_constants(const QuadraticObjective& f, double radius, int samples, double eps, Rng& rng);

}  // namespace semifl
