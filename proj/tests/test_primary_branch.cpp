#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "gpvortex/primary_branch.hpp"

using namespace gpv;

namespace {

// strong-form residual at off-grid radii, using the eigen-expansion of the
// linear part: (-Delta + r^2) psi = sum_n c_n lambda_n e_n exactly
double strong_residual(const PrimaryBranchPoint& p, double r) {
  double lin = 0.0, psi = 0.0;
  for (int n = 0; n < p.coeffs.size(); ++n) {
    const double e = eigenfunction_value({p.m0, n}, r);
    lin += p.coeffs[n] * oscillator_eigenvalue({p.m0, n}) * e;
    psi += p.coeffs[n] * e;
  }
  return lin + psi * psi * psi - p.omega * psi;
}

}  // namespace

TEST_CASE("frequency slope closed forms") {
  CHECK(omega_slope(1) == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(omega_slope(2) == doctest::Approx(0.375).epsilon(1e-13));
  CHECK(omega_slope(3) == doctest::Approx(0.3125).epsilon(1e-13));
  CHECK_THROWS(omega_slope(0));
}

TEST_CASE("zero amplitude point is exact") {
  auto disc = make_discretization(24, 1);
  auto p = solve_primary(1, 0.0, disc);
  CHECK(p.omega == 4.0);
  CHECK(p.coeffs.norm() == 0.0);
  CHECK(p.residual == 0.0);
}

TEST_CASE("input guards") {
  auto disc = make_discretization(16, 2);
  CHECK_THROWS(solve_primary(0, 0.1, disc));
  CHECK_THROWS(solve_primary(3, 0.1, disc));
  CHECK_THROWS(solve_primary(1, -0.1, disc));
  CHECK_THROWS(continue_branch(2, {0.0, 0.1, 0.1}, disc));
}

TEST_CASE("small amplitude frequency and constraint") {
  auto disc = make_discretization(48, 2);
  auto p = solve_primary(2, 0.1, disc);
  CHECK(p.omega == doctest::Approx(6.00375).epsilon(2e-5));
  CHECK(p.coeffs[0] == doctest::Approx(0.1).epsilon(1e-13));
  CHECK(p.residual <= 1e-10);
  CHECK(p.positive);
}

TEST_CASE("fitted frequency curvature matches the slope constant") {
  for (int m0 : {1, 2, 3}) {
    auto disc = make_discretization(48, m0);
    // fit omega(a) - 2(m0+1) = s a^2 + t a^4 over a in [0.01, 0.1]
    std::vector<double> grid;
    for (int i = 1; i <= 10; ++i) grid.push_back(0.01 * i);
    Eigen::MatrixXd x(10, 2);
    Eigen::VectorXd y(10);
    auto pts = continue_branch(m0, grid, disc);
    for (int i = 0; i < 10; ++i) {
      const double a2 = grid[i] * grid[i];
      x(i, 0) = a2;
      x(i, 1) = a2 * a2;
      y[i] = pts[i].omega - 2.0 * (m0 + 1);
    }
    Eigen::Vector2d fit = (x.transpose() * x).ldlt().solve(x.transpose() * y);
    CHECK(fit[0] == doctest::Approx(omega_slope(m0)).epsilon(0.01));
  }
}

TEST_CASE("branch sweep is increasing and warm starts converge") {
  auto disc = make_discretization(48, 2);
  std::vector<double> grid{0.0, 0.02, 0.04, 0.06, 0.08, 0.1};
  auto pts = continue_branch(2, grid, disc);
  REQUIRE(pts.size() == 6);
  for (std::size_t i = 1; i < pts.size(); ++i) {
    CHECK(pts[i].omega > pts[i - 1].omega);
    CHECK(pts[i].residual <= 1e-10);
  }
  CHECK(pts[0].omega == 6.0);
}

TEST_CASE("profile stays near the leading mode") {
  auto disc = make_discretization(48, 1);
  // || psi - a e_{1,0} || = O(a^3): fitted exponent from a doubling
  auto d = [&](double a) {
    auto p = solve_primary(1, a, disc);
    Eigen::VectorXd lead = Eigen::VectorXd::Zero(disc.n_radial);
    lead[0] = a;
    return (p.coeffs - lead).norm();
  };
  const double d1 = d(0.05), d2 = d(0.1);
  CHECK(std::log2(d2 / d1) >= 2.7);
}

TEST_CASE("no radial zeros at moderate amplitude") {
  auto disc = make_discretization(48, 3);
  for (int m0 : {1, 3}) {
    auto p = solve_primary(m0, 0.2, disc);
    CHECK(p.positive);
    Eigen::VectorXd psi = branch_profile(p, disc);
    int k = 0;
    for (; k < psi.size(); ++k)
      if (disc.quartic_rule.nodes[k] > 6.0) break;
    CHECK(psi.head(k).minCoeff() > 0.0);
  }
}

TEST_CASE("strong form residual off the grid") {
  auto disc = make_discretization(48, 2);
  auto p = solve_primary(2, 0.1, disc);
  for (double r : {0.37, 1.234, 2.1, 3.456}) {
    CHECK(std::abs(strong_residual(p, r)) <= 1e-8);
  }
}
