#pragma once

#include "semifl/common.hpp"

#include <limits>

namespace semifl {

// minimize c^T x  s.t.  A_ub x <= b_ub,  A_eq x = b_eq,  lb <= x <= ub  (lb finite, ub may be +inf)
struct LinearProgram {
  Eigen::VectorXd c;
  Eigen::MatrixXd A_ub;
  Eigen::VectorXd b_ub;
  Eigen::MatrixXd A_eq;
  Eigen::VectorXd b_eq;
  Eigen::VectorXd lb;
  Eigen::VectorXd ub;

  explicit LinearProgram(Index n = 0)
      : c(Eigen::VectorXd::Zero(n)),
        A_ub(0, n),
        A_eq(0, n),
        lb(Eigen::VectorXd::Zero(n)),
        ub(Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity())) {}

  void add_le(const Eigen::Ref<const Eigen::RowVectorXd>& a, double b);
  void add_eq(const Eigen::Ref<const Eigen::RowVectorXd>& a, double b);
};

struct LpResult {
  Eigen::VectorXd x;
  double objective = 0;
  int pivots = 0;
};

// Dense two-phase tableau simplex with Bland's rule (terminates on degenerate problems).
// Throws LpInfeasible; an unbounded objective is an InvalidArgument.
LpResult solve_lp(const LinearProgram& lp, double tol = 1e-9);

}  // namespace semifl
