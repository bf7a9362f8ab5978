#pragma once

#include "semifl/common.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace semifl::sdp {

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
double inner(const Mat<Scalar>& A, const Mat<Scalar>& B) {
  using std::real;
  return real((A.conjugate().cwiseProduct(B)).sum());
}

// Euclidean projection onto {x >= 0, sum x = 1}.
inline Eigen::VectorXd project_simplex(const Eigen::VectorXd& v) {
  Eigen::VectorXd u = v;
  std::sort(u.data(), u.data() + u.size(), std::greater<double>());
  double cum = 0, tau = 0;
  for (Index j = 0; j < u.size(); ++j) {
    cum += u[j];
    double t = (cum - 1.0) / static_cast<double>(j + 1);
    if (u[j] - t > 0) tau = t;
  }
  return (v.array() - tau).max(0.0).matrix();
}

template <typename Scalar>
Mat<Scalar> project_spectraplex(const Mat<Scalar>& Y) {
  Mat<Scalar> H = (Y + Y.adjoint()) / Scalar(2);
  Eigen::SelfAdjointEigenSolver<Mat<Scalar>> es(H);
  Eigen::VectorXd lam = project_simplex(es.eigenvalues());
  return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().adjoint();
}

template <typename Scalar>
double lambda_max(const Mat<Scalar>& W) {
  Eigen::SelfAdjointEigenSolver<Mat<Scalar>> es(W, Eigen::EigenvaluesOnly);
  return es.eigenvalues()[W.rows() - 1];
}

// tr(W) - |W|_2
template <typename Scalar>
double rank_gap(const Mat<Scalar>& W) {
  using std::real;
  return real(W.trace()) - lambda_max(W);
}

// minimize sum_j c_j / <A_j, W>  s.t.  <A_j, W> >= d_j,  W PSD,  tr W = 1
template <typename Scalar>
struct FractionalProgram {
  std::vector<Mat<Scalar>> A;
  Eigen::VectorXd c;
  Eigen::VectorXd d;

  Eigen::VectorXd gains(const Mat<Scalar>& W) const {
    Eigen::VectorXd g(A.size());
    for (std::size_t j = 0; j < A.size(); ++j) g[j] = inner(A[j], W);
    return g;
  }

  double objective(const Eigen::VectorXd& g) const {
    double f = 0;
    for (Index j = 0; j < g.size(); ++j) {
      if (c[j] > 0) f += c[j] / g[j];
    }
    return f;
  }
};

struct InnerOptions {
  int max_iter = 4000;
  double tol = 1e-9;
  double mu0 = 1e-3;  // initial barrier weight
};

template <typename Scalar>
struct InnerResult {
  Mat<Scalar> W;
  double value = 0;        // surrogate value (normalized units)
  double lower_bound = 0;  // certified lower bound on the surrogate minimum
  int iterations = 0;
  double mu = 0;  // barrier weight at exit
};

// Minimizes psi(W) = f(W)/scale + beta (1 - <S, W>) over the constraint set (S may be null).
// Power floors d_j > 0 are handled with a log barrier driven to zero; W0 must satisfy them
// strictly. The lower bound comes from linearizing psi at the final point and pricing the
// floors with the barrier multipliers.
template <typename Scalar>
InnerResult<Scalar> solve_inner(const FractionalProgram<Scalar>& p, double scale, double beta, const Mat<Scalar>* S,
                                Mat<Scalar> W, const InnerOptions& o) {
  const Index m = static_cast<Index>(p.A.size());
  int n_barrier = 0;
  for (Index j = 0; j < m; ++j) n_barrier += p.d[j] > 0;

  auto admissible = [&](const Eigen::VectorXd& g) {
    for (Index j = 0; j < m; ++j) {
      if (p.c[j] > 0 && !(g[j] > 0)) return false;
      if (p.d[j] > 0 && !(g[j] > p.d[j])) return false;
    }
    return true;
  };
  auto psi = [&](const Mat<Scalar>& X, const Eigen::VectorXd& g) {
    double v = p.objective(g) / scale;
    if (S) v += beta * (1.0 - inner(*S, X));
    return v;
  };
  auto phi = [&](const Mat<Scalar>& X, const Eigen::VectorXd& g, double mu) {
    double v = psi(X, g);
    if (mu > 0) {
      for (Index j = 0; j < m; ++j) {
        if (p.d[j] > 0) v -= mu * std::log(g[j] - p.d[j]);
      }
    }
    return v;
  };
  auto grad = [&](const Eigen::VectorXd& g, double mu) {
    Mat<Scalar> G = Mat<Scalar>::Zero(W.rows(), W.cols());
    for (Index j = 0; j < m; ++j) {
      double w = 0;
      if (p.c[j] > 0) w -= p.c[j] / (scale * g[j] * g[j]);
      if (mu > 0 && p.d[j] > 0) w -= mu / (g[j] - p.d[j]);
      if (w != 0) G += Scalar(w) * p.A[j];
    }
    if (S) G -= Scalar(beta) * (*S);
    return G;
  };

  InnerResult<Scalar> r;
  Eigen::VectorXd g = p.gains(W);
  double mu = n_barrier > 0 ? o.mu0 : 0.0;
  double alpha = -1;
  int total = 0;
  for (;;) {
    double f = phi(W, g, mu);
    Mat<Scalar> G = grad(g, mu);
    if (alpha <= 0) alpha = 1.0 / std::max(G.norm(), 1e-300);
    int stall = 0;
    while (total < o.max_iter) {
      ++total;
      bool accepted = false;
      Mat<Scalar> Wt;
      Eigen::VectorXd gt;
      double ft = 0;
      for (int bt = 0; bt < 60; ++bt) {
        Wt = project_spectraplex<Scalar>(W - Scalar(alpha) * G);
        gt = p.gains(Wt);
        if (admissible(gt)) {
          ft = phi(Wt, gt, mu);
          Mat<Scalar> Dw = Wt - W;
          if (ft <= f + inner(G, Dw) + Dw.squaredNorm() / (2 * alpha) + 1e-15 * std::abs(f)) {
            accepted = true;
            break;
          }
        }
        alpha *= 0.5;
      }
      if (!accepted) break;
      Mat<Scalar> Gt = grad(gt, mu);
      Mat<Scalar> dW = Wt - W;
      Mat<Scalar> dG = Gt - G;
      double step = dW.norm();
      double decrease = f - ft;
      W = Wt;
      g = gt;
      G = Gt;
      f = ft;
      double sy = inner(dW, dG);
      alpha = sy > 0 ? dW.squaredNorm() / sy : alpha * 2;
      alpha = std::clamp(alpha, 1e-14, 1e14);
      if (step <= 1e-14 || decrease <= 1e-16 * std::max(1.0, std::abs(f))) {
        if (++stall >= 3) break;
      } else {
        stall = 0;
      }
    }
    if (mu == 0 || total >= o.max_iter) break;
    if (mu * n_barrier <= o.tol * 1e-3 * std::max(1.0, std::abs(psi(W, g)))) break;
    mu *= 0.1;
  }

  r.W = W;
  r.iterations = total;
  r.mu = mu;
  r.value = psi(W, g);
  Mat<Scalar> Gpsi = grad(g, 0.0);
  Mat<Scalar> Dual = Gpsi;
  double lb = r.value - inner(Gpsi, W);
  for (Index j = 0; j < m; ++j) {
    if (p.d[j] > 0 && mu > 0) {
      double lam = mu / (g[j] - p.d[j]);
      lb += lam * p.d[j];
      Dual -= Scalar(lam) * p.A[j];
    }
  }
  Eigen::SelfAdjointEigenSolver<Mat<Scalar>> es((Dual + Dual.adjoint()) / Scalar(2), Eigen::EigenvaluesOnly);
  r.lower_bound = lb + es.eigenvalues()[0];
  return r;
}

}  // namespace semifl::sdp
