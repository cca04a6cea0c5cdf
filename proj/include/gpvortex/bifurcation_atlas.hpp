#pragma once

// Closed-form bifurcation predictions along the symmetric branch: counts of
// negative/zero directions, the rational leading-order crossing frequencies,
// quadratic coefficients of the crossing curves near the rotation ceiling,
// 2x2 reduced matrices with their factorial cross-checks, crossing-index
// parity, and the small-eigenvalue threshold slopes.

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "gpvortex/hessian_blocks.hpp"

namespace gpv {

struct Rational {
  long long num = 0;
  long long den = 1;  // always > 0, reduced

  double value() const { return static_cast<double>(num) / den; }
  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num == b.num && a.den == b.den;
  }
  friend bool operator<(const Rational& a, const Rational& b) {
    return a.num * b.den < b.num * a.den;
  }
};

Rational make_rational(long long num, long long den);
Rational rational_sub(const Rational& a, const Rational& b);
Rational rational_add(const Rational& a, const Rational& b);

struct Counts {
  int negatives = 0;  // N: strictly negative directions at rest
  int zeros = 0;      // Z: zero modes beyond the gauge pair
  int curves = 0;     // B: crossing curves strictly inside (0, 2)
};

// Formulas m0(m0+1)/2, m0, m0(m0-1)/2, each verified against a direct
// enumeration of the underlying index sets; disagreement throws.
Counts counts(int m0);

struct BifurcationPoint {
  int m = 0;                  // block index, m > m0
  int n = 0;                  // radial index of the crossing mode
  Rational omega0;            // leading-order crossing frequency, in (0, 2)
  int multiplicity = 1;       // kernel dimension within its dihedral sector
  bool resonant = false;      // another curve shares omega0 in this sector
  int dihedral_order = 0;     // m - m0
};

// All crossing curves with omega0 strictly inside (0, 2), sorted by
// descending omega0; the boundary curve at the rotation ceiling is handled
// by last_bifurcation / detect_last_crossing.
std::vector<BifurcationPoint> curve_list(int m0);

// Leading-order crossing frequency (2(m0 - |m-2m0|) - 4n)/(m - m0).
Rational crossing_location(int m0, int m, int n);

// Quadratic shift coefficient of the small eigenvalue attached to the
// zero mode of block m0 + 2*ell at rest, ell = 1..m0.
double mu_tilde(int m0, int ell);

enum class ReducedContext { last_omega, last_lambda, midrange_lambda };

struct ReducedMatrix {
  ReducedContext context = ReducedContext::last_omega;
  int m = 0;                    // block the reduction describes
  Eigen::Matrix2d assembled;    // from quadrature overlaps
  Eigen::Matrix2d closed_form;  // factorial route; must match assembled
  Eigen::Vector2d eigenvalues;  // of the associated problem, ascending
  Eigen::Vector2d kernel;       // normalized kernel vector when one exists
};

// Frequency coefficient of the final crossing: Omega = 2 + coeff * a^2 with
// coeff = -(2m0)!/(4^m0 m0! (m0+1)!) < 0.
double last_frequency_coefficient(int m0);

// Growth-rate eigenvalue of the final crossing: (2m0+1)!/(4^m0 m0!(m0+1)!).
double last_growth_eigenvalue(int m0);

// Reduction of block m0+1 near the rotation ceiling.  The frequency problem
// (context last_omega) has eigenvalues {0, last_frequency_coefficient};
// its kernel holds the zero mode of the block at the crossing, with sector
// weights (sqrt(m0), -sqrt(m0+1))/sqrt(2m0+1).
ReducedMatrix last_bifurcation(int m0);
ReducedMatrix last_lambda_matrix(int m0);

// The single reduced eigenvalue of blocks m >= 2m0+1 at the ceiling:
// 2(m0+m)!/(2^{m0+m} m0! m!) + (2m0)!(m-2m0-1)/(4^{m0} m0!(m0+1)!).
double tail_lambda(int m0, int m);

// Two-mode reduction of block m for m0+2 <= m <= 2m0 at the ceiling
// (context midrange_lambda, no kernel in general).
ReducedMatrix midrange_matrix(int m0, int m);

struct MidrangeSignature {
  int m = 0;
  int positives = 0;
  int negatives = 0;
  bool frequency_real = false;  // reduced frequency problem has real spectrum
};

struct MidrangeClassification {
  std::vector<MidrangeSignature> signatures;  // m = m0+2 .. 2m0
  int realized = 0;                           // count with frequency_real
  std::vector<int> realized_m;
};

MidrangeClassification classify_midrange(int m0);

// Net parity change +-2 of (-1)^{Morse count} across a non-resonant curve,
// evaluated in its dihedral sector with exact rational arithmetic; the
// final curve carries (-1)^{m0} * 2.
int index_parity(int m0, const BifurcationPoint& curve);

// Parity of the final crossing, (-1)^{m0} * 2.
int last_index_parity(int m0);

struct ThresholdSlope {
  int ell = 0;
  double mu = 0.0;     // mu_tilde(m0, ell)
  double slope = 0.0;  // 0 when mu > 0, else detected Omega/a^2 threshold
  bool positive_at_rest = false;
};

// For each ell: zero threshold when the rest eigenvalue is already positive,
// otherwise the rotation slope at which the tracked small eigenvalue turns
// positive, estimated from crossings at two small amplitudes.
std::vector<ThresholdSlope> zero_threshold_slopes(
    int m0, const RadialDiscretization& disc);

// Locate a listed curve at finite amplitude (bracket around omega0).
CrossingResult detect_curve(const BifurcationPoint& curve,
                            const PrimaryBranchPoint& branch,
                            const RadialDiscretization& disc);

// Locate the final crossing just below the rotation ceiling.
CrossingResult detect_last_crossing(const PrimaryBranchPoint& branch,
                                    const RadialDiscretization& disc);

}  // namespace gpv
