#include "semifl/simplex.hpp"

#include <cmath>

namespace semifl {

void LinearProgram::add_le(const Eigen::Ref<const Eigen::RowVectorXd>& a, double b) {
  A_ub.conservativeResize(A_ub.rows() + 1, c.size());
  A_ub.row(A_ub.rows() - 1) = a;
  b_ub.conservativeResize(b_ub.size() + 1);
  b_ub[b_ub.size() - 1] = b;
}

void LinearProgram::add_eq(const Eigen::Ref<const Eigen::RowVectorXd>& a, double b) {
  A_eq.conservativeResize(A_eq.rows() + 1, c.size());
  A_eq.row(A_eq.rows() - 1) = a;
  b_eq.conservativeResize(b_eq.size() + 1);
  b_eq[b_eq.size() - 1] = b;
}

namespace {

struct Tableau {
  Eigen::MatrixXd T;  // rows 0..m-1 constraints, row m objective; last column rhs
  std::vector<Index> basis;
  int pivots = 0;

  Index rows() const { return T.rows() - 1; }
  Index rhs() const { return T.cols() - 1; }

  void pivot(Index r, Index col) {
    T.row(r) /= T(r, col);
    for (Index i = 0; i < T.rows(); ++i) {
      if (i != r && T(i, col) != 0.0) T.row(i) -= T(i, col) * T.row(r);
    }
    basis[r] = col;
    ++pivots;
  }

  // Bland's rule over columns [0, ncols). Returns false when unbounded.
  bool optimize(Index ncols, double tol) {
    const Index m = rows();
    for (int guard = 0; guard < 100000; ++guard) {
      Index enter = -1;
      for (Index j = 0; j < ncols; ++j) {
        if (T(m, j) < -tol) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;
      Index leave = -1;
      double best = 0;
      for (Index i = 0; i < m; ++i) {
        if (T(i, enter) > tol) {
          double ratio = T(i, rhs()) / T(i, enter);
          if (leave < 0 || ratio < best - 1e-15 ||
              (std::abs(ratio - best) <= 1e-15 && basis[i] < basis[leave])) {
            leave = i;
            best = ratio;
          }
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
    fail(ErrorCode::LpInfeasible, "simplex iteration guard reached");
  }
};

}  // namespace

LpResult solve_lp(const LinearProgram& lp, double tol) {
  const Index n = lp.c.size();
  require(lp.A_ub.cols() == n && lp.A_eq.cols() == n, "LP column mismatch");
  require(lp.A_ub.rows() == lp.b_ub.size() && lp.A_eq.rows() == lp.b_eq.size(), "LP row mismatch");
  require(lp.lb.size() == n && lp.ub.size() == n && lp.lb.allFinite(), "LP bounds invalid");
  for (Index j = 0; j < n; ++j) {
    if (lp.ub[j] < lp.lb[j] - tol) fail(ErrorCode::LpInfeasible, "empty variable box");
  }

  // Shift to y = x - lb >= 0 and collect inequality rows (finite upper bounds become rows).
  std::vector<Eigen::RowVectorXd> le_rows, eq_rows;
  std::vector<double> le_rhs, eq_rhs;
  for (Index i = 0; i < lp.A_ub.rows(); ++i) {
    le_rows.push_back(lp.A_ub.row(i));
    le_rhs.push_back(lp.b_ub[i] - lp.A_ub.row(i).dot(lp.lb));
  }
  for (Index j = 0; j < n; ++j) {
    if (std::isfinite(lp.ub[j])) {
      Eigen::RowVectorXd e = Eigen::RowVectorXd::Zero(n);
      e[j] = 1;
      le_rows.push_back(e);
      le_rhs.push_back(lp.ub[j] - lp.lb[j]);
    }
  }
  for (Index i = 0; i < lp.A_eq.rows(); ++i) {
    eq_rows.push_back(lp.A_eq.row(i));
    eq_rhs.push_back(lp.b_eq[i] - lp.A_eq.row(i).dot(lp.lb));
  }

  const Index m_le = static_cast<Index>(le_rows.size());
  const Index m = m_le + static_cast<Index>(eq_rows.size());
  // columns: y (n) | slacks (m_le) | artificials (m) | rhs
  const Index n_cols = n + m_le + m;
  Tableau tab;
  tab.T = Eigen::MatrixXd::Zero(m + 1, n_cols + 1);
  tab.basis.assign(m, -1);

  for (Index i = 0; i < m; ++i) {
    const bool le = i < m_le;
    Eigen::RowVectorXd a = le ? le_rows[i] : eq_rows[i - m_le];
    double b = le ? le_rhs[i] : eq_rhs[i - m_le];
    double scale = std::max(a.cwiseAbs().maxCoeff(), 1e-300);
    a /= scale;
    b /= scale;
    double slack = le ? 1.0 : 0.0;
    if (b < 0) {
      a = -a;
      b = -b;
      slack = -slack;
    }
    tab.T.row(i).head(n) = a;
    if (le) tab.T(i, n + i) = slack;
    tab.T(i, n_cols) = b;
    if (le && slack > 0) {
      tab.basis[i] = n + i;
    } else {
      tab.T(i, n + m_le + i) = 1.0;
      tab.basis[i] = n + m_le + i;
    }
  }

  // Phase 1: minimize the sum of the artificials in the basis.
  bool need_phase1 = false;
  for (Index i = 0; i < m; ++i) {
    if (tab.basis[i] >= n + m_le) {
      need_phase1 = true;
      tab.T.row(m) -= tab.T.row(i);
      tab.T(m, tab.basis[i]) = 0.0;
    }
  }
  if (need_phase1) {
    tab.optimize(n_cols, tol);
    if (-tab.T(m, n_cols) > tol * std::max<double>(1.0, static_cast<double>(m))) {
      fail(ErrorCode::LpInfeasible, "LP has no feasible point");
    }
    // Drive remaining artificials out of the basis where possible.
    for (Index i = 0; i < m; ++i) {
      if (tab.basis[i] < n + m_le) continue;
      for (Index j = 0; j < n + m_le; ++j) {
        if (std::abs(tab.T(i, j)) > tol) {
          tab.pivot(i, j);
          break;
        }
      }
    }
  }

  // Phase 2 objective on the structural columns only; artificials never re-enter.
  double cscale = std::max(lp.c.cwiseAbs().maxCoeff(), 1e-300);
  tab.T.row(m).setZero();
  tab.T.row(m).head(n) = lp.c.transpose() / cscale;
  for (Index i = 0; i < m; ++i) {
    Index bcol = tab.basis[i];
    if (tab.T(m, bcol) != 0.0) tab.T.row(m) -= tab.T(m, bcol) * tab.T.row(i);
  }
  if (!tab.optimize(n + m_le, tol)) fail(ErrorCode::InvalidArgument, "LP objective is unbounded");

  LpResult res;
  Eigen::VectorXd y = Eigen::VectorXd::Zero(n_cols);
  for (Index i = 0; i < m; ++i) y[tab.basis[i]] = tab.T(i, n_cols);
  res.x = y.head(n) + lp.lb;
  for (Index j = 0; j < n; ++j) res.x[j] = std::min(std::max(res.x[j], lp.lb[j]), lp.ub[j]);
  res.objective = lp.c.dot(res.x);
  res.pivots = tab.pivots;
  return res;
}

}  // namespace semifl
