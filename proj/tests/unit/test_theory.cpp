#include <doctest.h>

#include "semifl/theory.hpp"

#include <cmath>

using namespace semifl;

TEST_CASE("stable gap hand values") {
  // L/mu / (4 mu - L) = 1 at L = 2, mu = 1; A2 + sigma2 Q / (2 nu) = 0.5 + 0.5
  CHECK(thm2_gap(1.0, 2.0, 1.0, 0.5, 1.0, 1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(thm2_gap(2.0, 1.0, 1.0, 0.0, 3.0, 4) == doctest::Approx(1.0).epsilon(1e-15));  // (1/3) * 3
  double prev = std::numeric_limits<double>::infinity();
  for (double nu : {1e-3, 1e-2, 1e-1, 1.0, 10.0}) {
    double g = thm2_gap(nu, 1.0, 0.6, 0.1, 1e-3, 100);
    CHECK(g < prev);
    prev = g;
  }
  // floor as nu grows: L A2 / (mu (4mu - L))
  CHECK(thm2_gap(1e12, 1.0, 0.6, 0.1, 1e-3, 100) == doctest::Approx(0.1 / 0.6 / 1.4).epsilon(1e-9));
  try {
    thm2_gap(1.0, 4.0, 1.0, 0.0, 1.0, 1);
    FAIL("expected NonContractive");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonContractive);
  }
}

TEST_CASE("descent lower bound hand value") {
  // eta=1, mu=1, eps=1, A2=0: (1/4) * 2 * bracket^2 + sigma2 Q rhoL^2 / (4 nu)
  // ratio=3, rhoL=0.5 -> bracket 2 -> 2; sigma2=1, Q=4, nu=1 -> 0.25
  CHECK(thm1_lower_bound(1.0, 1.0, 1.0, 0.0, 3.0, 0.5, 1.0, 4, 1.0) == doctest::Approx(2.25).epsilon(1e-15));
  // ratio 1 removes rhoL from the bracket
  double a = thm1_lower_bound(0.1, 2.0, 1.5, 0.2, 1.0, 0.3, 0.0, 10, 1.0);
  double b = thm1_lower_bound(0.1, 2.0, 1.5, 0.2, 1.0, 0.9, 0.0, 10, 1.0);
  CHECK(a == doctest::Approx(b).epsilon(1e-15));
  CHECK(a == doctest::Approx(0.01 / 4 * (2 * 2 * 2.25 - 0.2) - 0.2).epsilon(1e-14));
  // larger amplitude ratio never lowers the bound
  CHECK(thm1_lower_bound(0.1, 2.0, 1.5, 0.2, 5.0, 0.9, 0.0, 10, 1.0) > a);
  CHECK_THROWS_AS(thm1_lower_bound(1.0, 1.0, 0.1, 1.0, 1.0, 1.0, 0.0, 1, 1.0), Error);
  CHECK_THROWS_AS(thm1_lower_bound(1.0, 1.0, 1.0, 0.0, 1.0, 1.5, 0.0, 1, 1.0), Error);
}

TEST_CASE("heterogeneous descent bound hand value") {
  // eta=1, mu=1, eps=1, A2=1, ratio=2, rhoL=0.5, rhoE=0.5 -> mix 1.5
  // 0.5*2.25 + sigma(2)*Q(4)*0.25/4 - 1*C(10)/K(5)*0.25*dd(0.4) - (omega(1)/4 + 2.25/4 + 1)*1
  double want = 1.125 + 0.5 - 0.2 - (0.25 + 0.5625 + 1);
  CHECK(cor1_lower_bound(1.0, 1.0, 1.0, 1.0, 2.0, 0.5, 0.5, 2.0, 4, 1.0, 1.0, 10, 5, 0.4) ==
        doctest::Approx(want).epsilon(1e-15));
  // heterogeneity only lowers the bound
  double iid = cor1_lower_bound(0.5, 1.0, 1.0, 0.5, 2.0, 0.7, 0.3, 1.0, 10, 1.0, 1.0, 10, 20, 0.0);
  double skew = cor1_lower_bound(0.5, 1.0, 1.0, 0.5, 2.0, 0.7, 0.3, 1.0, 10, 1.0, 1.0, 10, 20, 3.0);
  CHECK(skew < iid);
  CHECK_THROWS_AS(cor1_lower_bound(0.5, 1.0, 1.0, 0.5, 2.0, 0.7, 0.3, 1.0, 10, 1.0, 1.0, 10, 20, -1.0), Error);
}

TEST_CASE("accumulated gap against the geometric series") {
  const double L = 1.0, mu = 0.8, A2 = 0.3;  // contraction 0.25
  const double q = L / mu - 1;
  const double pre = L * A2 * 10 / (mu * mu * 20);
  for (int h : {1, 2, 5, 50}) {
    Cor2Result r = cor2_gap(L, mu, A2, 1e-3, 100, 0.5, 10, 20, {2.0}, {0.5}, h);
    double a = 0.25 * 2.0;
    CHECK(r.accumulation == doctest::Approx(pre * a * (1 - std::pow(q, h)) / (1 - q)).epsilon(1e-13));
    CHECK(r.first_term == doctest::Approx(L / mu / (2 * mu - L) * (A2 + 1e-3 * 100 / 1.0)).epsilon(1e-14));
    double limit = pre * a / (1 - q);
    CHECK(std::abs(limit - r.accumulation) <= r.remainder_bound * (1 + 1e-12) + 1e-14 * limit);  // rounding
  }
  // sequences: later entries carry less weight than recent ones
  Cor2Result a = cor2_gap(L, mu, A2, 0, 1, 1, 10, 20, {1.0, 0.0, 0.0}, {1.0}, 3);
  Cor2Result b = cor2_gap(L, mu, A2, 0, 1, 1, 10, 20, {0.0, 0.0, 1.0}, {1.0}, 3);
  CHECK(a.accumulation == doctest::Approx(pre * q * q).epsilon(1e-14));
  CHECK(b.accumulation == doctest::Approx(pre).epsilon(1e-14));
  CHECK_THROWS_AS(cor2_gap(3.0, 1.0, A2, 0, 1, 1, 10, 20, {1.0}, {1.0}), Error);
}

TEST_CASE("two-region partial sums approach the limit") {
  const double L = 1.0, mu = 0.4, A2 = 0.1, s2 = 1e-3;  // xi = 0.25
  TwoRegionGap g = two_region_gap(1, 1e-3, 1e-1, L, mu, A2, s2, 100, 5.0, 1);
  CHECK(g.legacy == 0.0);
  CHECK(g.high == 0.0);
  CHECK(g.initial == 5.0);
  TwoRegionGap far = two_region_gap(10, 1e-3, 1e-1, L, mu, A2, s2, 100, 5.0, 2000);
  CHECK(far.partial() == doctest::Approx(far.limit).epsilon(1e-9));
  CHECK(far.limit == doctest::Approx(thm2_gap(1e-1, L, mu, A2, s2, 100)).epsilon(1e-14));
  // more rounds at the low normalizer leave a larger legacy term at the same t
  TwoRegionGap early = two_region_gap(5, 1e-3, 1e-1, L, mu, A2, s2, 100, 5.0, 20);
  TwoRegionGap late = two_region_gap(15, 1e-3, 1e-1, L, mu, A2, s2, 100, 5.0, 20);
  CHECK(late.legacy > early.legacy);
  CHECK_THROWS_AS(two_region_gap(5, 1e-3, 1e-1, L, mu, A2, s2, 100, 5.0, 4), Error);
}

TEST_CASE("constant estimation on a diagonal quadratic") {
  QuadraticObjective f;
  f.H = Eigen::Vector3d(1.0, 2.0, 3.0).asDiagonal();
  f.w_star = Eigen::Vector3d(1, -1, 0.5);
  Rng rng = make_rng(2, 2);
  AssumptionConstants c = estimate_constants(f, 0.5, 20000, 0.7, rng);
  CHECK(c.L == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(c.mu == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(c.eps == 0.7);
  // the sup of |H d|^2 over the ball is (L r)^2
  CHECK(c.A2 <= 2.25 * (1 + 1e-12));
  CHECK(c.A2 >= 2.25 * 0.95);
  CHECK(c.xi() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(f.value(f.w_star) == 0.0);

  f.H(0, 1) = 0.5;
  CHECK_THROWS_AS(estimate_constants(f, 0.5, 10, 0.7, rng), Error);
}
