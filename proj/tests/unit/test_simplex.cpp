#include <doctest.h>

#include "semifl/simplex.hpp"

#include <cmath>

using namespace semifl;

namespace {

Eigen::RowVectorXd row(std::initializer_list<double> v) {
  Eigen::RowVectorXd r(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) r[i++] = x;
  return r;
}

bool feasible(const LinearProgram& lp, const Eigen::VectorXd& x, double tol) {
  if (lp.A_ub.rows() && ((lp.A_ub * x - lp.b_ub).array() > tol).any()) return false;
  if (lp.A_eq.rows() && ((lp.A_eq * x - lp.b_eq).array().abs() > tol).any()) return false;
  return ((x - lp.lb).array() >= -tol).all() && ((lp.ub - x).array() >= -tol).all();
}

}  // namespace

TEST_CASE("textbook maximization") {
  // max 3x + 5y st x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), value 36
  LinearProgram lp(2);
  lp.c << -3, -5;
  lp.add_le(row({1, 0}), 4);
  lp.add_le(row({0, 2}), 12);
  lp.add_le(row({3, 2}), 18);
  LpResult r = solve_lp(lp);
  CHECK(r.x[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(r.x[1] == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(r.objective == doctest::Approx(-36.0).epsilon(1e-12));
}

TEST_CASE("equality and bounds") {
  // min x + 2y + 3z st x + y + z = 1, y >= 0.2 (lb), z <= 0.1 (ub)
  LinearProgram lp(3);
  lp.c << 1, 2, 3;
  lp.add_eq(row({1, 1, 1}), 1);
  lp.lb << 0, 0.2, 0;
  lp.ub << 1, 1, 0.1;
  LpResult r = solve_lp(lp);
  CHECK(r.x[0] == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(r.x[1] == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(std::abs(r.x[2]) < 1e-12);
  CHECK(r.objective == doctest::Approx(1.2).epsilon(1e-12));
}

TEST_CASE("negative right-hand sides") {
  // min x + y st x + y >= 2  (as -x - y <= -2), x - y <= 1
  LinearProgram lp(2);
  lp.c << 1, 1;
  lp.add_le(row({-1, -1}), -2);
  lp.add_le(row({1, -1}), 1);
  LpResult r = solve_lp(lp);
  CHECK(r.objective == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(feasible(lp, r.x, 1e-12));
}

TEST_CASE("infeasible and unbounded") {
  LinearProgram bad(1);
  bad.c << 1;
  bad.add_le(row({1}), -1);
  try {
    solve_lp(bad);
    FAIL("expected LpInfeasible");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::LpInfeasible);
  }
  LinearProgram open(2);
  open.c << -1, 0;
  open.add_le(row({-1, 1}), 0);
  try {
    solve_lp(open);
    FAIL("expected unbounded error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidArgument);
  }
}

TEST_CASE("degenerate cycling example terminates") {
  // Beale's example: cycles under the textbook largest-coefficient rule
  LinearProgram lp(4);
  lp.c << -0.75, 150, -0.02, 6;
  lp.add_le(row({0.25, -60, -0.04, 9}), 0);
  lp.add_le(row({0.5, -90, -0.02, 3}), 0);
  lp.add_le(row({0, 0, 1, 0}), 1);
  LpResult r = solve_lp(lp);
  CHECK(r.objective == doctest::Approx(-0.05).epsilon(1e-10));
  CHECK(feasible(lp, r.x, 1e-12));
}

TEST_CASE("random two-variable programs match vertex enumeration") {
  Rng rng = make_rng(17, 1);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 50; ++trial) {
    LinearProgram lp(2);
    lp.c << u(rng), u(rng);
    lp.ub << 1, 1;
    for (int i = 0; i < 3; ++i) lp.add_le(row({u(rng), u(rng)}), 0.5 + std::abs(u(rng)));
    LpResult r = solve_lp(lp);
    REQUIRE(feasible(lp, r.x, 1e-9));
    // brute force: every pairwise intersection of constraint lines and box edges
    std::vector<std::pair<Eigen::RowVector2d, double>> lines;
    for (Index i = 0; i < lp.A_ub.rows(); ++i) lines.push_back({lp.A_ub.row(i), lp.b_ub[i]});
    lines.push_back({Eigen::RowVector2d(1, 0), 0});
    lines.push_back({Eigen::RowVector2d(1, 0), 1});
    lines.push_back({Eigen::RowVector2d(0, 1), 0});
    lines.push_back({Eigen::RowVector2d(0, 1), 1});
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < lines.size(); ++i)
      for (std::size_t j = i + 1; j < lines.size(); ++j) {
        Eigen::Matrix2d A;
        A << lines[i].first, lines[j].first;
        if (std::abs(A.determinant()) < 1e-12) continue;
        Eigen::Vector2d x = A.partialPivLu().solve(Eigen::Vector2d(lines[i].second, lines[j].second));
        if (feasible(lp, x, 1e-9)) best = std::min(best, lp.c.dot(x));
      }
    CHECK(r.objective == doctest::Approx(best).epsilon(1e-9).scale(1.0));
  }
}
