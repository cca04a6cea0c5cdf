#include "gpvortex/bifurcation_atlas.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "gpvortex/hermite_basis.hpp"
#include "gpvortex/primary_branch.hpp"

namespace gpv {
namespace {

double log_fact(int k) { return std::lgamma(static_cast<double>(k) + 1.0); }

// (2m0)!/(4^m0 (m0!)^2), the rest frequency-slope constant.
double omega_constant(int m0) {
  return pair_overlap_closed(m0, m0);
}

// <e_{m0,0}^2 e_{i,0} e_{j,0}> by quadrature.
double q_overlap(int m0, int i, int j) {
  return quartic_overlap({m0, 0}, {m0, 0}, {i, 0}, {j, 0});
}

Eigen::Vector2d kernel_of(const Eigen::Matrix2d& m) {
  // Rows of a singular 2x2 are parallel; use the larger one.
  Eigen::RowVector2d row =
      m.row(0).norm() >= m.row(1).norm() ? m.row(0) : m.row(1);
  Eigen::Vector2d v(row(1), -row(0));
  v.normalize();
  if (v(0) < 0.0) v = -v;
  return v;
}

Eigen::Vector2d symmetric_eigenvalues(const Eigen::Matrix2d& m) {
  const double mean = 0.5 * (m(0, 0) + m(1, 1));
  const double rad =
      std::hypot(0.5 * (m(0, 0) - m(1, 1)), 0.5 * (m(0, 1) + m(1, 0)));
  return {mean - rad, mean + rad};
}

void require_match(const Eigen::Matrix2d& assembled,
                   const Eigen::Matrix2d& closed, const char* what) {
  const double tol = 1e-10 * (1.0 + closed.norm());
  if ((assembled - closed).norm() > tol) {
    throw std::runtime_error(std::string(what) +
                             ": overlap assembly disagrees with the "
                             "factorial route beyond 1e-10");
  }
}

// Symmetric two-mode overlap matrix of block m at the rotation ceiling,
// before the frequency shift: diag -w + 2<psi^2 e e> plus coupling.
Eigen::Matrix2d ceiling_overlap_matrix(int m0, int m, bool assembled) {
  const int mv = m;
  const int mw = std::abs(m - 2 * m0);
  Eigen::Matrix2d s;
  if (assembled) {
    const double w = quartic_overlap({m0, 0}, {m0, 0}, {m0, 0}, {m0, 0});
    s(0, 0) = -w + 2.0 * q_overlap(m0, mv, mv);
    s(1, 1) = -w + 2.0 * q_overlap(m0, mw, mw);
    s(0, 1) = s(1, 0) = q_overlap(m0, mv, mw);
  } else {
    const double w = omega_constant(m0);
    s(0, 0) = 2.0 * pair_overlap_closed(m0, mv) - w;
    s(1, 1) = 2.0 * pair_overlap_closed(m0, mw) - w;
    const double log_s = std::lgamma(2.0 * m0 + 1.0) -
                         2.0 * m0 * std::log(2.0) - log_fact(m0) -
                         0.5 * (log_fact(mv) + log_fact(mw));
    s(0, 1) = s(1, 0) = std::exp(log_s);
  }
  return s;
}

void check_m0(int m0) {
  if (m0 < 1) throw std::invalid_argument("vortex charge must be >= 1");
}

long long igcd(long long a, long long b) { return std::gcd(a, b); }

}  // namespace

Rational make_rational(long long num, long long den) {
  if (den == 0) throw std::invalid_argument("rational: zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const long long g = igcd(num < 0 ? -num : num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  if (num == 0) den = 1;
  return {num, den};
}

Rational rational_sub(const Rational& a, const Rational& b) {
  return make_rational(a.num * b.den - b.num * a.den, a.den * b.den);
}

Rational rational_add(const Rational& a, const Rational& b) {
  return make_rational(a.num * b.den + b.num * a.den, a.den * b.den);
}

Counts counts(int m0) {
  check_m0(m0);
  Counts c;
  c.negatives = m0 * (m0 + 1) / 2;
  c.zeros = m0;
  c.curves = m0 * (m0 - 1) / 2;

  // Negative directions at rest: modes with |m| + 2n < m0 over all
  // harmonics.
  int neg = 0;
  for (int m = -(m0 - 1); m <= m0 - 1; ++m)
    for (int n = 0; std::abs(m) + 2 * n < m0; ++n) ++neg;

  // Zero modes beyond the gauge pair: one per block m0 < m <= 3m0 whose
  // conjugate sector satisfies |m - 2m0| + 2n = m0.
  int zer = 0;
  for (int m = m0 + 1; m <= 3 * m0; ++m) {
    const int rem = m0 - std::abs(m - 2 * m0);
    if (rem >= 0 && rem % 2 == 0) ++zer;
  }

  // Curves: crossing frequencies strictly inside (0, 2).
  int cur = 0;
  for (int m = m0 + 1; m < 3 * m0; ++m)
    for (int n = 0; std::abs(m - 2 * m0) + 2 * n < m0; ++n) {
      const Rational w = crossing_location(m0, m, n);
      if (w.num > 0 && w < make_rational(2, 1)) ++cur;
    }

  if (neg != c.negatives || zer != c.zeros || cur != c.curves)
    throw std::logic_error("counts: enumeration disagrees with formulas");
  return c;
}

Rational crossing_location(int m0, int m, int n) {
  check_m0(m0);
  if (m <= m0) throw std::invalid_argument("crossing_location: need m > m0");
  if (n < 0) throw std::invalid_argument("crossing_location: need n >= 0");
  const long long top = 2 * (m0 - std::abs(m - 2 * m0)) - 4 * n;
  return make_rational(top, m - m0);
}

std::vector<BifurcationPoint> curve_list(int m0) {
  check_m0(m0);
  std::vector<BifurcationPoint> out;
  for (int m = m0 + 1; m < 3 * m0; ++m)
    for (int n = 0; std::abs(m - 2 * m0) + 2 * n < m0; ++n) {
      const Rational w = crossing_location(m0, m, n);
      if (w.num <= 0 || !(w < make_rational(2, 1))) continue;
      BifurcationPoint p;
      p.m = m;
      p.n = n;
      p.omega0 = w;
      p.dihedral_order = m - m0;
      out.push_back(p);
    }

  // A curve is resonant when another listed curve crosses at the same
  // frequency and lives inside this curve's dihedral sector.
  for (auto& p : out) {
    for (const auto& q : out) {
      if (&p == &q) continue;
      if (!(p.omega0 == q.omega0)) continue;
      if ((q.m - m0) % p.dihedral_order == 0) {
        ++p.multiplicity;
        p.resonant = true;
      }
    }
  }

  std::sort(out.begin(), out.end(),
            [](const BifurcationPoint& a, const BifurcationPoint& b) {
              if (!(a.omega0 == b.omega0)) return b.omega0 < a.omega0;
              return a.m < b.m;
            });

  if (static_cast<int>(out.size()) != counts(m0).curves)
    throw std::logic_error("curve_list: size disagrees with counts");
  return out;
}

double mu_tilde(int m0, int ell) {
  check_m0(m0);
  if (ell < 1 || ell > m0)
    throw std::invalid_argument("mu_tilde: need 1 <= ell <= m0");
  const int mw = std::abs(m0 - 2 * ell);
  const int n = (m0 - mw) / 2;
  const double overlap = quartic_overlap({m0, 0}, {m0, 0}, {mw, n}, {mw, n});
  return -omega_constant(m0) + 2.0 * overlap;
}

double last_frequency_coefficient(int m0) {
  check_m0(m0);
  return -omega_constant(m0) / (m0 + 1);
}

double last_growth_eigenvalue(int m0) {
  check_m0(m0);
  return (2 * m0 + 1) * omega_constant(m0) / (m0 + 1);
}

ReducedMatrix last_bifurcation(int m0) {
  check_m0(m0);
  const Eigen::Matrix2d j = Eigen::Vector2d(1.0, -1.0).asDiagonal();
  const Eigen::Matrix2d sa = ceiling_overlap_matrix(m0, m0 + 1, true);
  const Eigen::Matrix2d sc = ceiling_overlap_matrix(m0, m0 + 1, false);

  ReducedMatrix r;
  r.context = ReducedContext::last_omega;
  r.m = m0 + 1;
  r.assembled = j * sa;
  r.closed_form = j * sc;
  require_match(r.assembled, r.closed_form, "last_bifurcation");

  // j*s is singular by construction, so its spectrum is {0, trace}.
  const double coeff = r.assembled.trace();
  r.eigenvalues = coeff < 0.0 ? Eigen::Vector2d(coeff, 0.0)
                              : Eigen::Vector2d(0.0, coeff);
  const double det = r.assembled.determinant();
  if (std::abs(det) > 1e-10 * (1.0 + r.assembled.norm()))
    throw std::runtime_error(
        "last_bifurcation: frequency matrix lost its zero eigenvalue");
  if (std::abs(coeff - last_frequency_coefficient(m0)) > 1e-10)
    throw std::runtime_error(
        "last_bifurcation: frequency coefficient disagrees with the "
        "factorial route beyond 1e-10");

  // The block's zero mode at the crossing solves (s - coeff*j) v = 0.
  r.kernel = kernel_of(sa - coeff * j);
  return r;
}

ReducedMatrix last_lambda_matrix(int m0) {
  check_m0(m0);
  const Eigen::Matrix2d j = Eigen::Vector2d(1.0, -1.0).asDiagonal();
  const Eigen::Matrix2d sa = ceiling_overlap_matrix(m0, m0 + 1, true);
  const Eigen::Matrix2d sc = ceiling_overlap_matrix(m0, m0 + 1, false);
  const double coeff_a = (j * sa).trace();
  const double coeff_c = last_frequency_coefficient(m0);

  ReducedMatrix r;
  r.context = ReducedContext::last_lambda;
  r.m = m0 + 1;
  r.assembled = sa - coeff_a * j;
  r.closed_form = sc - coeff_c * j;
  require_match(r.assembled, r.closed_form, "last_lambda_matrix");
  r.eigenvalues = symmetric_eigenvalues(r.assembled);
  if (std::abs(r.eigenvalues.cwiseAbs().minCoeff()) > 1e-10)
    throw std::runtime_error(
        "last_lambda_matrix: growth matrix lost its zero eigenvalue");
  if (std::abs(r.eigenvalues.cwiseAbs().maxCoeff() -
               last_growth_eigenvalue(m0)) > 1e-10)
    throw std::runtime_error(
        "last_lambda_matrix: growth eigenvalue disagrees with the "
        "factorial route beyond 1e-10");
  r.kernel = kernel_of(r.assembled);
  return r;
}

double tail_lambda(int m0, int m) {
  check_m0(m0);
  if (m < 2 * m0 + 1)
    throw std::invalid_argument("tail_lambda: need m >= 2m0 + 1");
  return 2.0 * pair_overlap_closed(m0, m) +
         (m - 2 * m0 - 1) * omega_constant(m0) / (m0 + 1);
}

ReducedMatrix midrange_matrix(int m0, int m) {
  check_m0(m0);
  if (m < m0 + 2 || m > 2 * m0)
    throw std::invalid_argument("midrange_matrix: need m0+2 <= m <= 2m0");
  const Eigen::Matrix2d j = Eigen::Vector2d(1.0, -1.0).asDiagonal();
  const double shift = m - m0;

  const Eigen::Matrix2d sa = ceiling_overlap_matrix(m0, m, true);
  const double coeff_a =
      (j * ceiling_overlap_matrix(m0, m0 + 1, true)).trace();
  const Eigen::Matrix2d sc = ceiling_overlap_matrix(m0, m, false);
  const double coeff_c = last_frequency_coefficient(m0);

  ReducedMatrix r;
  r.context = ReducedContext::midrange_lambda;
  r.m = m;
  r.assembled = sa - shift * coeff_a * j;
  r.closed_form = sc - shift * coeff_c * j;
  require_match(r.assembled, r.closed_form, "midrange_matrix");
  r.eigenvalues = symmetric_eigenvalues(r.assembled);
  r.kernel.setZero();
  return r;
}

MidrangeClassification classify_midrange(int m0) {
  check_m0(m0);
  MidrangeClassification out;
  for (int m = m0 + 2; m <= 2 * m0; ++m) {
    const ReducedMatrix red = midrange_matrix(m0, m);
    MidrangeSignature sig;
    sig.m = m;
    for (int i = 0; i < 2; ++i)
      (red.eigenvalues(i) > 0.0 ? sig.positives : sig.negatives) += 1;
    // The reduced frequency problem s*c = nu*(m-m0)*diag(1,-1)*c has real
    // spectrum exactly when (s11 + s22)^2 >= 4 s12^2.
    const Eigen::Matrix2d s = ceiling_overlap_matrix(m0, m, false);
    const double sum = s(0, 0) + s(1, 1);
    sig.frequency_real = sum * sum >= 4.0 * s(0, 1) * s(0, 1);
    if (sig.frequency_real) {
      ++out.realized;
      out.realized_m.push_back(m);
    }
    out.signatures.push_back(sig);
  }
  return out;
}

int index_parity(int m0, const BifurcationPoint& curve) {
  check_m0(m0);
  if (curve.resonant)
    throw std::invalid_argument("index_parity: curve must be non-resonant");
  const int q = curve.dihedral_order;
  if (q < 1) throw std::invalid_argument("index_parity: bad dihedral order");
  if (q == 1) return last_index_parity(m0);

  // Collect the sector's crossing frequencies to size a safe offset.
  std::vector<Rational> walls = {make_rational(0, 1), make_rational(2, 1)};
  for (int j = m0 + q; j < 3 * m0; j += q)
    for (int n = 0; std::abs(j - 2 * m0) + 2 * n < m0; ++n) {
      const Rational w = crossing_location(m0, j, n);
      if (w.num > 0 && w < make_rational(2, 1) && !(w == curve.omega0))
        walls.push_back(w);
    }
  Rational delta = make_rational(2, 1);
  for (const auto& w : walls) {
    Rational gap = rational_sub(w, curve.omega0);
    if (gap.num < 0) gap.num = -gap.num;
    gap = make_rational(gap.num, 2 * gap.den);
    if (gap < delta) delta = gap;
  }

  // Count conjugate-sector negatives in the dihedral sector at omega0 -+
  // delta: modes with 2(|j-2m0| + 2n - m0) + omega (j - m0) < 0, exactly.
  const auto side_count = [&](const Rational& omega) {
    int count = 0;
    for (int j = m0 + q; j < 3 * m0; j += q)
      for (int n = 0; std::abs(j - 2 * m0) + 2 * n < m0; ++n) {
        const long long base = 2 * (std::abs(j - 2 * m0) + 2 * n - m0);
        if (base * omega.den + omega.num * (j - m0) < 0) ++count;
      }
    return count;
  };
  const int below = side_count(rational_sub(curve.omega0, delta));
  const int above = side_count(rational_add(curve.omega0, delta));
  const int parity = (below % 2 == 0 ? 1 : -1) - (above % 2 == 0 ? 1 : -1);
  if (parity == 0)
    throw std::logic_error("index_parity: crossing left the parity fixed");
  return parity;
}

int last_index_parity(int m0) {
  check_m0(m0);
  return m0 % 2 == 0 ? 2 : -2;
}

std::vector<ThresholdSlope> zero_threshold_slopes(
    int m0, const RadialDiscretization& disc) {
  check_m0(m0);
  if (disc.m_abs_max < 3 * m0)
    throw std::invalid_argument(
        "zero_threshold_slopes: discretization must cover |m| <= 3 m0");
  std::vector<ThresholdSlope> out;
  for (int ell = 1; ell <= m0; ++ell) {
    ThresholdSlope t;
    t.ell = ell;
    t.mu = mu_tilde(m0, ell);
    if (t.mu > 0.0) {
      t.positive_at_rest = true;
      out.push_back(t);
      continue;
    }
    // The tracked eigenvalue behaves like mu*a^2 + 2*ell*omega; find its
    // sign change at two amplitudes and extrapolate the slope to a -> 0.
    const int m = m0 + 2 * ell;
    const int n = (m0 - std::abs(2 * ell - m0)) / 2;
    const double a1 = 0.02, a2 = 0.03;
    const auto slope_at = [&](double a) {
      const PrimaryBranchPoint branch = solve_primary(m0, a, disc);
      const double guess = -t.mu * a * a / (2.0 * ell);
      const double hi = std::max(8.0 * guess, 1e-4);
      const CrossingResult hit = find_crossing(m, n, branch, 0.0, hi, disc);
      return hit.omega_star / (a * a);
    };
    const double s1 = slope_at(a1), s2 = slope_at(a2);
    t.slope = (s1 * a2 * a2 - s2 * a1 * a1) / (a2 * a2 - a1 * a1);
    out.push_back(t);
  }
  return out;
}

CrossingResult detect_curve(const BifurcationPoint& curve,
                            const PrimaryBranchPoint& branch,
                            const RadialDiscretization& disc) {
  const double w0 = curve.omega0.value();
  const double lo = std::max(w0 - 0.08, 1e-4);
  const double hi = std::min(w0 + 0.04, 2.0 - 1e-6);
  return find_crossing(curve.m, curve.n, branch, lo, hi, disc);
}

CrossingResult detect_last_crossing(const PrimaryBranchPoint& branch,
                                    const RadialDiscretization& disc) {
  return find_crossing(branch.m0 + 1, 0, branch, 2.0 - 0.05, 2.0 - 1e-6,
                       disc);
}

}  // namespace gpv
