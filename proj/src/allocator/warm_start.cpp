#include "semifl/allocator.hpp"
#include "semifl/simplex.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace semifl {

namespace {

// Energy of the data and compute paths as a function of x = [theta; u], u = data budget / T_max,
// with zeta, fhat, ftilde set to their latency-tight values (or their caps when pinned).
struct SplitEnergy {
  int K = 0;
  double T = 0;
  Pinned pin = Pinned::None;
  Eigen::VectorXd c, P;  // exp-perspective data energy: P u (exp(c theta/u) - 1)
  Eigen::VectorXd lin_D;  // power pin: lin_D theta
  Eigen::VectorXd K1;     // local: K1 (1 - theta)^3
  Eigen::VectorXd lin_F;  // frequency pin: lin_F (1 - theta)
  double K3 = 0;          // edge: K3 S^3 / (T (1 - u))^2
  double lin_E = 0;       // frequency pin: lin_E S

  double value(const Eigen::VectorXd& x) const {
    double f = 0, S = x.head(K).sum(), u = x[K];
    for (int k = 0; k < K; ++k) {
      double th = x[k];
      f += pin == Pinned::Power ? lin_D[k] * th : P[k] * u * std::expm1(c[k] * th / u);
      f += pin == Pinned::Frequency ? lin_F[k] * (1 - th) : K1[k] * std::pow(1 - th, 3);
    }
    if (pin == Pinned::Frequency) {
      f += lin_E * S;
    } else {
      double y = T * (1 - u);
      f += K3 * S * S * S / (y * y);
    }
    return f;
  }

  void derivatives(const Eigen::VectorXd& x, Eigen::VectorXd& g, Eigen::MatrixXd& H) const {
    const Index n = K + 1;
    g.setZero(n);
    H.setZero(n, n);
    double S = x.head(K).sum(), u = x[K];
    for (int k = 0; k < K; ++k) {
      double th = x[k];
      if (pin == Pinned::Power) {
        g[k] += lin_D[k];
      } else {
        double v = c[k] * th / u, e = std::exp(v);
        g[k] += P[k] * c[k] * e;
        g[K] += P[k] * (std::expm1(v) - v * e);
        H(k, k) += P[k] * c[k] * c[k] * e / u;
        H(k, K) += -P[k] * c[k] * v * e / u;
        H(K, K) += P[k] * v * v * e / u;
      }
      if (pin == Pinned::Frequency) {
        g[k] -= lin_F[k];
      } else {
        double r = 1 - th;
        g[k] += -3 * K1[k] * r * r;
        H(k, k) += 6 * K1[k] * r;
      }
    }
    if (pin == Pinned::Frequency) {
      for (int k = 0; k < K; ++k) g[k] += lin_E;
    } else {
      double y = T * (1 - u);
      double y2 = y * y, y3 = y2 * y, y4 = y3 * y;
      double dS = 3 * K3 * S * S / y2;
      double dSS = 6 * K3 * S / y2;
      double dSu = 6 * K3 * S * S / y3 * T;
      for (int k = 0; k < K; ++k) {
        g[k] += dS;
        for (int j = 0; j < K; ++j) H(k, j) += dSS;
        H(k, K) += dSu;
      }
      g[K] += 2 * K3 * S * S * S / y3 * T;
      H(K, K) += 6 * K3 * S * S * S / y4 * T * T;
    }
    for (int k = 0; k < K; ++k) H(K, k) = H(k, K);
  }
};

// Interior of {z : A z <= b} via the LP max delta s.t. a_i z + |a_i| delta <= b_i.
Eigen::VectorXd chebyshev_point(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, double& margin) {
  const Index n = A.cols();
  LinearProgram lp(n + 1);
  lp.c[n] = -1;
  lp.ub[n] = 1;
  for (Index i = 0; i < A.rows(); ++i) {
    Eigen::RowVectorXd row(n + 1);
    row << A.row(i), A.row(i).norm();
    lp.add_le(row, b[i]);
  }
  LpResult r;
  try {
    r = solve_lp(lp, 1e-12);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::LpInfeasible)
      fail(ErrorCode::LatencyInfeasible, "no data split meets the latency, power and frequency caps");
    throw;
  }
  margin = r.x[n];
  return r.x.head(n);
}

}  // namespace

WarmStart latency_split_start(Region region, const NetworkConfig& cfg, const RegionThresholds& thr,
                              const Eigen::VectorXd& gain_D, Pinned pin, const Eigen::VectorXd* theta_fixed) {
  const int K = cfg.K;
  require(gain_D.size() == K, "gain size mismatch");
  require(pin != Pinned::Theta || (theta_fixed && theta_fixed->size() == K), "theta pin needs a theta vector");
  const double T = thr.T_max;
  const double T_G = latency_gradient(cfg.Q, cfg.M, cfg.T_s);
  if (!(T > T_G)) fail(ErrorCode::LatencyInfeasible, "T_max must exceed the gradient-upload latency T_G");
  for (int k = 0; k < K; ++k) {
    if (!(gain_D[k] > kUnservableGain)) {
      std::ostringstream os;
      os << "device " << k << " has no usable data-uplink gain";
      fail(ErrorCode::UnservableDevice, os.str());
    }
  }

  const double a = cfg.D * cfg.Cbar / cfg.B;
  Eigen::VectorXd r(K);
  SplitEnergy E;
  E.K = K;
  E.T = T;
  E.pin = pin;
  E.c.resize(K), E.P.resize(K), E.lin_D.resize(K), E.K1.resize(K), E.lin_F.resize(K);
  for (int k = 0; k < K; ++k) {
    r[k] = std::log1p(cfg.p_max * gain_D[k] / cfg.sigma2) / std::numbers::ln2;
    E.c[k] = a * std::numbers::ln2 / T;
    E.P[k] = cfg.sigma2 * T / gain_D[k];
    E.lin_D[k] = cfg.p_max * a / r[k];
    double w = cfg.D * cfg.Chat[k];
    E.K1[k] = cfg.kappa_hat * w * w * w / ((T - T_G) * (T - T_G));
    E.lin_F[k] = cfg.kappa_hat * w * cfg.fhat_max * cfg.fhat_max;
  }
  const double we = cfg.D * cfg.Ctilde;
  E.K3 = cfg.kappa_tilde * we * we * we;
  E.lin_E = cfg.kappa_tilde * we * cfg.ftilde_max * cfg.ftilde_max;

  // Rows A x <= b over x = [theta; u].
  const Index n = K + 1;
  std::vector<std::pair<Eigen::RowVectorXd, double>> rows;
  auto row = [&]() { return Eigen::RowVectorXd::Zero(n).eval(); };
  for (int k = 0; k < K; ++k) {
    auto lo = row(), hi = row(), pw = row(), fh = row();
    if (pin != Pinned::Theta) {  // a pinned theta overrides the region box
      lo[k] = -1;
      rows.emplace_back(lo, -thr.box_lo(region));
      hi[k] = 1;
      rows.emplace_back(hi, thr.box_hi(region));
    }
    pw[k] = a;
    pw[K] = -r[k] * T;
    rows.emplace_back(pw, 0.0);
    fh[k] = -cfg.D * cfg.Chat[k];
    rows.emplace_back(fh, cfg.fhat_max * (T - T_G) - cfg.D * cfg.Chat[k]);
  }
  {
    auto lo = row(), hi = row(), ft = row();
    lo[K] = -1;
    rows.emplace_back(lo, 0.0);
    hi[K] = 1;
    rows.emplace_back(hi, 1.0);
    ft.head(K).setConstant(we);
    ft[K] = cfg.ftilde_max * T;
    rows.emplace_back(ft, cfg.ftilde_max * T);
  }

  // Affine elimination of pinned coordinates: x = x0 + P z.
  std::vector<Index> free;
  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(n);
  if (pin == Pinned::Theta) {
    x0.head(K) = *theta_fixed;
    free.push_back(K);
  } else {
    for (Index i = 0; i < n; ++i) free.push_back(i);
  }
  const Index m = static_cast<Index>(free.size());
  auto lift = [&](const Eigen::VectorXd& z) {
    Eigen::VectorXd x = x0;
    for (Index i = 0; i < m; ++i) x[free[i]] = z[i];
    return x;
  };

  std::vector<Eigen::RowVectorXd> Az;
  std::vector<double> bz;
  for (const auto& [ax, bx] : rows) {
    Eigen::RowVectorXd az(m);
    for (Index i = 0; i < m; ++i) az[i] = ax[free[i]];
    double rhs = bx - ax.dot(x0);
    double nrm = az.norm();
    if (nrm == 0) {
      if (rhs < -1e-12 * std::max(1.0, std::abs(bx)))
        fail(ErrorCode::LatencyInfeasible, "pinned data split violates a latency or frequency cap");
      continue;
    }
    Az.push_back(az / nrm);
    bz.push_back(rhs / nrm);
  }
  Eigen::MatrixXd A(Az.size(), m);
  Eigen::VectorXd b(bz.size());
  for (std::size_t i = 0; i < Az.size(); ++i) {
    A.row(i) = Az[i];
    b[i] = bz[i];
  }

  double margin = 0;
  Eigen::VectorXd z = chebyshev_point(A, b, margin);
  if (margin > 1e-12) {
    auto slacks = [&](const Eigen::VectorXd& zz) { return (b - A * zz).eval(); };
    double f0 = E.value(lift(z));
    double fs = f0 > 0 && std::isfinite(f0) ? f0 : 1.0;
    auto F = [&](const Eigen::VectorXd& zz, double t) {
      Eigen::VectorXd s = slacks(zz);
      if (s.minCoeff() <= 0) return std::numeric_limits<double>::infinity();
      return t * E.value(lift(zz)) / fs - s.array().log().sum();
    };
    Eigen::VectorXd gx;
    Eigen::MatrixXd Hx;
    const double rows_n = static_cast<double>(A.rows());
    for (double t = 1.0; rows_n / t > 1e-10; t *= 20) {
      for (int it = 0; it < 200; ++it) {
        Eigen::VectorXd s = slacks(z);
        E.derivatives(lift(z), gx, Hx);
        Eigen::VectorXd g(m);
        Eigen::MatrixXd H(m, m);
        for (Index i = 0; i < m; ++i) {
          g[i] = t * gx[free[i]] / fs;
          for (Index j = 0; j < m; ++j) H(i, j) = t * Hx(free[i], free[j]) / fs;
        }
        Eigen::VectorXd inv = s.cwiseInverse();
        g += A.transpose() * inv;
        H += A.transpose() * inv.cwiseAbs2().asDiagonal() * A;
        Eigen::VectorXd dz = -H.ldlt().solve(g);
        double dec = -g.dot(dz);
        if (!(dec > 2e-12)) break;
        double Fz = F(z, t), step = 1;
        while (step > 1e-16 && !(F(z + step * dz, t) <= Fz - 0.25 * step * dec)) step *= 0.5;
        if (step <= 1e-16) break;
        z += step * dz;
      }
    }
  }

  Eigen::VectorXd x = lift(z);
  WarmStart w;
  w.theta = x.head(K);
  double u = std::clamp(x[K], 0.0, 1.0);
  w.data_budget = u * T;
  w.zeta.resize(K);
  w.fhat.resize(K);
  for (int k = 0; k < K; ++k) {
    double cap = cfg.p_max * gain_D[k];
    if (pin == Pinned::Power) {
      w.zeta[k] = cap;
    } else if (w.theta[k] <= 0) {
      w.zeta[k] = 0;
    } else {
      w.zeta[k] = std::min(cap, cfg.sigma2 * std::expm1(a * w.theta[k] / w.data_budget * std::numbers::ln2));
    }
    w.fhat[k] = pin == Pinned::Frequency ? cfg.fhat_max
                                         : std::min(cfg.fhat_max, cfg.D * cfg.Chat[k] * (1 - w.theta[k]) / (T - T_G));
  }
  double edge = we * w.theta.sum();
  if (pin == Pinned::Frequency) {
    w.ftilde = cfg.ftilde_max;
  } else {
    w.ftilde = edge > 0 ? std::min(cfg.ftilde_max, edge / (T - w.data_budget)) : 0.0;
  }
  w.energy = E.value(x);
  return w;
}

}  // namespace semifl
