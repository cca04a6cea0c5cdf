#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "gpvortex/bifurcation_atlas.hpp"
#include "gpvortex/hermite_basis.hpp"
#include "gpvortex/hessian_blocks.hpp"
#include "gpvortex/primary_branch.hpp"
#include "gpvortex/radial_spectral.hpp"

using namespace gpv;

namespace {

const BifurcationPoint& find_curve(const std::vector<BifurcationPoint>& list,
                                   int m, int n) {
  for (const auto& p : list)
    if (p.m == m && p.n == n) return p;
  throw std::logic_error("curve not listed");
}

}  // namespace

TEST_CASE("negative, zero, and curve counts follow the charge") {
  const Counts c1 = counts(1);
  CHECK(c1.negatives == 1);
  CHECK(c1.zeros == 1);
  CHECK(c1.curves == 0);
  const Counts c2 = counts(2);
  CHECK(c2.negatives == 3);
  CHECK(c2.zeros == 2);
  CHECK(c2.curves == 1);
  const Counts c4 = counts(4);
  CHECK(c4.negatives == 10);
  CHECK(c4.zeros == 4);
  CHECK(c4.curves == 6);
  for (int m0 = 1; m0 <= 20; ++m0) {
    const Counts c = counts(m0);  // enumeration cross-check is internal
    CHECK(c.negatives == m0 * (m0 + 1) / 2);
    CHECK(c.zeros == m0);
    CHECK(c.curves == m0 * (m0 - 1) / 2);
  }
  CHECK_THROWS_AS(counts(0), std::invalid_argument);
}

TEST_CASE("crossing frequencies are exact reduced rationals") {
  CHECK(crossing_location(2, 5, 0) == make_rational(2, 3));
  CHECK(crossing_location(3, 7, 0) == make_rational(1, 1));
  CHECK(crossing_location(3, 8, 0) == make_rational(2, 5));
  CHECK(crossing_location(3, 6, 1) == make_rational(2, 3));
  CHECK(crossing_location(4, 9, 0) == make_rational(6, 5));
  CHECK(make_rational(4, 6) == make_rational(2, 3));
  CHECK(make_rational(-4, -6) == make_rational(2, 3));
  CHECK(make_rational(3, -9).num == -1);
  CHECK(make_rational(0, 7).den == 1);
  CHECK_THROWS_AS(make_rational(1, 0), std::invalid_argument);
  CHECK_THROWS_AS(crossing_location(2, 2, 0), std::invalid_argument);
  CHECK_THROWS_AS(crossing_location(2, 5, -1), std::invalid_argument);
}

TEST_CASE("curve lists enumerate every interior crossing") {
  CHECK(curve_list(1).empty());

  const auto l2 = curve_list(2);
  REQUIRE(l2.size() == 1);
  CHECK(l2[0].m == 5);
  CHECK(l2[0].n == 0);
  CHECK(l2[0].omega0 == make_rational(2, 3));
  CHECK(l2[0].dihedral_order == 3);
  CHECK(l2[0].multiplicity == 1);
  CHECK_FALSE(l2[0].resonant);

  const auto l3 = curve_list(3);
  REQUIRE(l3.size() == 3);
  // Sorted by descending frequency.
  CHECK(l3[0].omega0 == make_rational(1, 1));
  CHECK(l3[0].m == 7);
  CHECK(l3[1].omega0 == make_rational(2, 3));
  CHECK(l3[1].m == 6);
  CHECK(l3[1].n == 1);
  CHECK(l3[2].omega0 == make_rational(2, 5));
  CHECK(l3[2].m == 8);
  for (const auto& p : l3) CHECK_FALSE(p.resonant);

  // Charge four carries a pair of curves sharing one frequency; the lower
  // dihedral order sees the other inside its own sector.
  const auto l4 = curve_list(4);
  REQUIRE(l4.size() == 6);
  CHECK(l4[0].omega0 == make_rational(6, 5));
  const auto& res = find_curve(l4, 7, 1);
  CHECK(res.omega0 == make_rational(2, 3));
  CHECK(res.resonant);
  CHECK(res.multiplicity == 2);
  const auto& clean = find_curve(l4, 10, 0);
  CHECK(clean.omega0 == make_rational(2, 3));
  CHECK_FALSE(clean.resonant);
  CHECK(clean.multiplicity == 1);
  CHECK(find_curve(l4, 11, 0).omega0 == make_rational(2, 7));

  for (int m0 = 1; m0 <= 20; ++m0) {
    const auto list = curve_list(m0);
    CHECK(static_cast<int>(list.size()) == counts(m0).curves);
    for (const auto& p : list) {
      CHECK(p.omega0.num > 0);
      CHECK(p.omega0.value() < 2.0);
      CHECK((p.multiplicity == 1) == !p.resonant);
    }
  }
}

TEST_CASE("rest shifts of the extra zero modes") {
  CHECK(mu_tilde(2, 1) == doctest::Approx(0.125).epsilon(1e-12));
  CHECK(mu_tilde(2, 2) == doctest::Approx(0.375).epsilon(1e-12));
  CHECK(mu_tilde(3, 2) == doctest::Approx(0.0625).epsilon(1e-12));
  CHECK(mu_tilde(3, 3) == doctest::Approx(0.3125).epsilon(1e-12));

  // ell = m0 reproduces the frequency-slope constant exactly.
  for (int m0 = 1; m0 <= 8; ++m0)
    CHECK(mu_tilde(m0, m0) ==
          doctest::Approx(pair_overlap_closed(m0, m0)).epsilon(1e-11));

  // ell = m0-1 reduces to 2 m0 (2m0-2)!/(4^m0 (m0!)^2).
  for (int m0 = 2; m0 <= 6; ++m0) {
    const double expect =
        2.0 * m0 *
        std::exp(std::lgamma(2.0 * m0 - 1.0) - 2.0 * m0 * std::log(2.0) -
                 2.0 * std::lgamma(m0 + 1.0));
    CHECK(mu_tilde(m0, m0 - 1) == doctest::Approx(expect).epsilon(1e-11));
  }

  // All shifts stay positive through charge four; the first negatives
  // appear at charge five, symmetric in ell.
  for (int m0 = 1; m0 <= 4; ++m0)
    for (int ell = 1; ell <= m0; ++ell) CHECK(mu_tilde(m0, ell) > 0.0);
  CHECK(mu_tilde(5, 2) == doctest::Approx(-3.0 / 256).epsilon(1e-11));
  CHECK(mu_tilde(5, 3) == doctest::Approx(-3.0 / 256).epsilon(1e-11));

  CHECK_THROWS_AS(mu_tilde(3, 0), std::invalid_argument);
  CHECK_THROWS_AS(mu_tilde(3, 4), std::invalid_argument);
}

TEST_CASE("ceiling coefficients in closed form") {
  CHECK(last_frequency_coefficient(1) == doctest::Approx(-0.25));
  CHECK(last_frequency_coefficient(2) == doctest::Approx(-0.125));
  CHECK(last_growth_eigenvalue(1) == doctest::Approx(0.75));
  CHECK(last_growth_eigenvalue(2) == doctest::Approx(0.625));
}

TEST_CASE("final-crossing frequency reduction") {
  const ReducedMatrix r = last_bifurcation(1);
  CHECK(r.m == 2);
  CHECK(r.assembled(0, 0) == doctest::Approx(0.25).epsilon(1e-10));
  CHECK(r.assembled(0, 1) ==
        doctest::Approx(std::pow(2.0, -1.5)).epsilon(1e-10));
  CHECK(r.assembled(1, 0) ==
        doctest::Approx(-std::pow(2.0, -1.5)).epsilon(1e-10));
  CHECK(r.assembled(1, 1) == doctest::Approx(-0.5).epsilon(1e-10));
  CHECK(r.eigenvalues(0) == doctest::Approx(-0.25).epsilon(1e-10));
  CHECK(std::abs(r.eigenvalues(1)) < 1e-10);
  CHECK(r.kernel(0) == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-9));
  CHECK(r.kernel(1) ==
        doctest::Approx(-std::sqrt(2.0 / 3.0)).epsilon(1e-9));

  // Overlap assembly and factorial route agree for every charge up to 20;
  // the crossing mode mixes the sectors with fixed weights.
  for (int m0 = 1; m0 <= 20; ++m0) {
    const ReducedMatrix b = last_bifurcation(m0);
    CHECK(b.eigenvalues(0) ==
          doctest::Approx(last_frequency_coefficient(m0)).epsilon(1e-10));
    const double norm = std::sqrt(2.0 * m0 + 1.0);
    CHECK(b.kernel(0) ==
          doctest::Approx(std::sqrt(m0 * 1.0) / norm).epsilon(1e-9));
    CHECK(b.kernel(1) ==
          doctest::Approx(-std::sqrt(m0 + 1.0) / norm).epsilon(1e-9));
  }
}

TEST_CASE("final-crossing growth reduction shares the kernel") {
  for (int m0 : {1, 2, 3, 7, 12, 20}) {
    const ReducedMatrix freq = last_bifurcation(m0);
    const ReducedMatrix grow = last_lambda_matrix(m0);
    CHECK(std::abs(grow.eigenvalues(0)) < 1e-10);
    CHECK(grow.eigenvalues(1) ==
          doctest::Approx(last_growth_eigenvalue(m0)).epsilon(1e-10));
    CHECK((grow.kernel - freq.kernel).norm() < 1e-9);
  }
  const ReducedMatrix g1 = last_lambda_matrix(1);
  CHECK(g1.eigenvalues(1) == doctest::Approx(0.75).epsilon(1e-10));
  CHECK(last_lambda_matrix(2).eigenvalues(1) ==
        doctest::Approx(0.625).epsilon(1e-10));
}

TEST_CASE("tail eigenvalues stay positive") {
  CHECK(tail_lambda(1, 3) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(tail_lambda(2, 5) == doctest::Approx(0.328125).epsilon(1e-12));
  for (int m0 = 1; m0 <= 16; ++m0)
    for (int m = 2 * m0 + 1; m <= 3 * m0 + 8; ++m)
      CHECK(tail_lambda(m0, m) > 0.0);
  CHECK_THROWS_AS(tail_lambda(2, 4), std::invalid_argument);
}

TEST_CASE("midrange reduction matches the factorial entries") {
  const ReducedMatrix r = midrange_matrix(2, 4);
  CHECK(r.closed_form(0, 0) == doctest::Approx(0.34375).epsilon(1e-12));
  CHECK(r.closed_form(1, 1) == doctest::Approx(-0.125).epsilon(1e-12));
  CHECK(r.closed_form(0, 1) ==
        doctest::Approx(0.375 / std::sqrt(6.0)).epsilon(1e-12));
  CHECK(r.eigenvalues(0) < 0.0);
  CHECK(r.eigenvalues(1) > 0.0);
  CHECK_THROWS_AS(midrange_matrix(2, 3), std::invalid_argument);
  CHECK_THROWS_AS(midrange_matrix(2, 5), std::invalid_argument);
}

TEST_CASE("midrange classification and realized curve counts") {
  const std::vector<std::pair<int, std::vector<int>>> expected = {
      {4, {8}}, {5, {10}}, {6, {11, 12}}, {7, {12, 13, 14}},
      {8, {14, 15, 16}}};
  for (const auto& [m0, members] : expected) {
    const MidrangeClassification mc = classify_midrange(m0);
    CHECK(mc.realized == static_cast<int>(members.size()));
    CHECK(mc.realized_m == members);
  }

  // One positive and one negative per block through charge sixteen.
  for (int m0 = 2; m0 <= 16; ++m0)
    for (const auto& s : classify_midrange(m0).signatures) {
      CHECK(s.positives == 1);
      CHECK(s.negatives == 1);
    }

  // Charge seventeen produces the first doubly negative block.
  bool found = false;
  for (const auto& s : classify_midrange(17).signatures)
    if (s.negatives == 2) {
      CHECK(s.m >= 19);
      CHECK(s.m <= 34);
      found = true;
    }
  CHECK(found);
  CHECK(classify_midrange(1).signatures.empty());
}

TEST_CASE("index parity flips across each crossing") {
  CHECK(index_parity(2, curve_list(2)[0]) == -2);

  const auto l3 = curve_list(3);
  CHECK(index_parity(3, find_curve(l3, 7, 0)) == -2);
  CHECK(index_parity(3, find_curve(l3, 6, 1)) == 2);
  CHECK(index_parity(3, find_curve(l3, 8, 0)) == -2);

  const auto l4 = curve_list(4);
  CHECK(index_parity(4, find_curve(l4, 9, 0)) == -2);
  CHECK(index_parity(4, find_curve(l4, 8, 1)) == 2);
  CHECK(index_parity(4, find_curve(l4, 10, 0)) == -2);
  CHECK_THROWS_AS(index_parity(4, find_curve(l4, 7, 1)),
                  std::invalid_argument);

  for (int m0 = 2; m0 <= 6; ++m0)
    for (const auto& p : curve_list(m0)) {
      if (p.resonant) continue;
      const int parity = index_parity(m0, p);
      CHECK(std::abs(parity) == 2);
    }

  CHECK(last_index_parity(1) == -2);
  CHECK(last_index_parity(2) == 2);
  CHECK(last_index_parity(3) == -2);
  CHECK(last_index_parity(4) == 2);
}

TEST_CASE("threshold slopes vanish while the rest shifts stay positive") {
  const RadialDiscretization disc = make_discretization(32, 9);
  for (int m0 : {1, 2, 3}) {
    const auto slopes = zero_threshold_slopes(m0, disc);
    REQUIRE(static_cast<int>(slopes.size()) == m0);
    for (const auto& t : slopes) {
      CHECK(t.positive_at_rest);
      CHECK(t.mu > 0.0);
      CHECK(t.slope == 0.0);
    }
  }
  CHECK_THROWS_AS(zero_threshold_slopes(4, disc), std::invalid_argument);
}

TEST_CASE("negative rest shifts at charge five produce finite thresholds") {
  const RadialDiscretization disc = make_discretization(32, 15);
  const auto slopes = zero_threshold_slopes(5, disc);
  REQUIRE(slopes.size() == 5);
  for (const auto& t : slopes) {
    if (t.ell == 2 || t.ell == 3) {
      CHECK_FALSE(t.positive_at_rest);
      CHECK(t.mu < 0.0);
      // Leading order predicts -mu / (2 ell).
      CHECK(t.slope ==
            doctest::Approx(-t.mu / (2.0 * t.ell)).epsilon(0.02));
    } else {
      CHECK(t.positive_at_rest);
      CHECK(t.slope == 0.0);
    }
  }
}

TEST_CASE("every listed curve is recovered at small amplitude") {
  const RadialDiscretization disc = make_discretization(32, 13);
  for (int m0 : {2, 3}) {
    const PrimaryBranchPoint b = solve_primary(m0, 0.02, disc);
    for (const auto& p : curve_list(m0)) {
      const CrossingResult hit = detect_curve(p, b, disc);
      CHECK(std::abs(hit.omega_star - p.omega0.value()) < 0.05);
      CHECK(std::abs(hit.eigenvalue) <= 1e-9);
      CHECK_FALSE(hit.resonant);
      CHECK(hit.krein.S == doctest::Approx(-1.0).epsilon(0.02));
      // The shift from the rational location is quadratic in amplitude.
      CHECK(p.omega0.value() - hit.omega_star > 0.0);
    }
  }

  // Quadratic shrink: halving the amplitude divides the shift by four.
  const PrimaryBranchPoint b2 = solve_primary(2, 0.02, disc);
  const PrimaryBranchPoint b1 = solve_primary(2, 0.01, disc);
  const BifurcationPoint curve = curve_list(2)[0];
  const double s2 = 2.0 / 3.0 - detect_curve(curve, b2, disc).omega_star;
  const double s1 = 2.0 / 3.0 - detect_curve(curve, b1, disc).omega_star;
  CHECK(s2 / s1 == doctest::Approx(4.0).epsilon(0.05));
  // The coefficient itself: shift = a^2 / 8 for the three-vortex curve.
  CHECK(s2 == doctest::Approx(0.02 * 0.02 / 8.0).epsilon(0.02));
}

TEST_CASE("final crossing sits at the predicted distance from the ceiling") {
  const RadialDiscretization disc = make_discretization(32, 6);
  for (int m0 : {1, 2}) {
    const double a = 0.05;
    const PrimaryBranchPoint b = solve_primary(m0, a, disc);
    const CrossingResult hit = detect_last_crossing(b, disc);
    const double predicted = 2.0 + last_frequency_coefficient(m0) * a * a;
    CHECK(std::abs(hit.omega_star - predicted) < 1e-5);
    CHECK(std::abs(hit.eigenvalue) <= 1e-9);
    CHECK(hit.krein.S ==
          doctest::Approx(-1.0 / (2 * m0 + 1)).epsilon(0.05));
  }
}

TEST_CASE("morse counts telescope across the full frequency sweep") {
  const double a = 0.05;
  const RadialDiscretization disc = make_discretization(24, 26);
  const std::vector<std::vector<double>> interior = {
      {1.0}, {0.3, 1.0}, {0.2, 0.55, 0.85, 1.5}};
  for (int m0 : {1, 2, 3}) {
    const PrimaryBranchPoint b = solve_primary(m0, a, disc);
    std::vector<int> seen;
    for (double w : interior[m0 - 1])
      seen.push_back(full_morse_count(b, w, 26, disc));
    // Probe on both sides of the final crossing, inside the quadratic
    // window below the ceiling.
    const double coeff = last_frequency_coefficient(m0);
    seen.push_back(
        full_morse_count(b, 2.0 + 1.1 * coeff * a * a, 26, disc));
    seen.push_back(
        full_morse_count(b, 2.0 + 0.9 * coeff * a * a, 26, disc));

    CHECK(seen.front() == m0 * (m0 + 1));  // twice the rest count
    CHECK(seen.back() == 2 * m0 - 2);
    int drops = 0;
    for (size_t i = 1; i < seen.size(); ++i) {
      CHECK(seen[i - 1] >= seen[i]);
      drops += seen[i - 1] - seen[i];
    }
    CHECK(drops == 2 * (1 + counts(m0).curves));
  }
}
