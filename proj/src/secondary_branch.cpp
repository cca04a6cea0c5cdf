#include "gpvortex/secondary_branch.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace gpv {

namespace {

constexpr double kNegativeBand = 1e-8;
constexpr double kConvergeTol = 1e-12;
constexpr double kAcceptTol = 1e-9;
constexpr int kMaxNewton = 40;
constexpr int kMaxHalvings = 30;
constexpr int kMaxSplitDepth = 8;
constexpr int kMorseGuardDepth = 5;

int harmonic_of(const DihedralSector& sector, int k) {
  return sector.m0 + k * sector.q;
}

// Node values of every retained harmonic together with the angular
// convolutions of the pair products; indices are shifted so t[s + 2 k_max]
// holds sum_{k1+k2=s} v_k1 v_k2 and aa[d + 2 k_max] holds
// sum_{k1-k2=d} v_k1 v_k2.
struct NodeProducts {
  std::vector<Eigen::ArrayXd> v;
  std::vector<Eigen::ArrayXd> t;
  std::vector<Eigen::ArrayXd> aa;
};

NodeProducts node_products(const DihedralSector& sector,
                           const std::vector<Eigen::VectorXd>& coeffs,
                           const RadialDiscretization& disc) {
  const int kk = sector.k_max;
  const int nq = static_cast<int>(disc.quartic_rule.nodes.size());
  NodeProducts p;
  p.v.resize(2 * kk + 1);
  for (int k = -kk; k <= kk; ++k) {
    const int ma = std::abs(harmonic_of(sector, k));
    p.v[k + kk] =
        (disc.modes_quartic(ma).transpose() * coeffs[k + kk]).array();
  }
  p.t.assign(4 * kk + 1, Eigen::ArrayXd::Zero(nq));
  p.aa.assign(4 * kk + 1, Eigen::ArrayXd::Zero(nq));
  for (int k1 = -kk; k1 <= kk; ++k1)
    for (int k2 = -kk; k2 <= kk; ++k2) {
      const Eigen::ArrayXd prod = p.v[k1 + kk] * p.v[k2 + kk];
      p.t[k1 + k2 + 2 * kk] += prod;
      p.aa[k1 - k2 + 2 * kk] += prod;
    }
  return p;
}

void check_coeffs(const DihedralSector& sector,
                  const std::vector<Eigen::VectorXd>& coeffs) {
  if (static_cast<int>(coeffs.size()) != 2 * sector.k_max + 1)
    throw std::invalid_argument("dihedral sector: wrong harmonic count");
  for (const auto& c : coeffs)
    if (c.size() != sector.n_radial)
      throw std::invalid_argument("dihedral sector: wrong radial length");
}

double diagonal_entry(const DihedralSector& sector,
                      const PrimaryBranchPoint& branch, double omega_rot,
                      int j, int n) {
  return 2.0 * (std::abs(j) + 2 * n + 1) - branch.omega -
         omega_rot * (j - sector.m0);
}

Eigen::VectorXd stack_coeffs(const std::vector<Eigen::VectorXd>& coeffs) {
  const int nr = static_cast<int>(coeffs.front().size());
  Eigen::VectorXd x(static_cast<int>(coeffs.size()) * nr);
  for (int c = 0; c < static_cast<int>(coeffs.size()); ++c)
    x.segment(c * nr, nr) = coeffs[c];
  return x;
}

std::vector<Eigen::VectorXd> split_coeffs(const Eigen::VectorXd& x, int nk,
                                          int nr) {
  std::vector<Eigen::VectorXd> coeffs(nk);
  for (int c = 0; c < nk; ++c) coeffs[c] = x.segment(c * nr, nr);
  return coeffs;
}

// Crossing mode placed at k = +1 (first sector half) and k = -1 (second
// half); the sign is pinned so the largest entry is positive.
Eigen::VectorXd constraint_direction(const DihedralSector& sector,
                                     const CrossingResult& crossing) {
  if (crossing.resonant)
    throw std::invalid_argument(
        "secondary branch: resonant crossing has no simple kernel direction");
  const int nr = sector.n_radial;
  if (crossing.vector.size() != 2 * nr)
    throw std::invalid_argument(
        "secondary branch: crossing vector does not match the sector size");
  Eigen::VectorXd f =
      Eigen::VectorXd::Zero((2 * sector.k_max + 1) * nr);
  f.segment((sector.k_max + 1) * nr, nr) = crossing.vector.head(nr);
  f.segment((sector.k_max - 1) * nr, nr) = crossing.vector.tail(nr);
  int lead = 0;
  f.cwiseAbs().maxCoeff(&lead);
  if (f(lead) < 0.0) f = -f;
  return f;
}

struct SolveState {
  double omega = 0.0;
  std::vector<Eigen::VectorXd> coeffs;
  double residual = 0.0;
};

double combined_norm(const Eigen::VectorXd& g, double con) {
  return std::sqrt(g.squaredNorm() + con * con);
}

// Bordered Newton in (v, Omega) with the amplitude constraint <v, f> =
// target closing the system; damped steps, quadratic tail expected.
bool newton_solve(const DihedralSector& sector,
                  const PrimaryBranchPoint& branch, const Eigen::VectorXd& f,
                  double target, SolveState& state,
                  const RadialDiscretization& disc) {
  const int nk = 2 * sector.k_max + 1;
  const int nr = sector.n_radial;
  const int dim = nk * nr;

  Eigen::VectorXd g = assemble_g(sector, branch, state.omega, state.coeffs, disc);
  double con = f.dot(stack_coeffs(state.coeffs)) - target;
  double fn = combined_norm(g, con);

  for (int iter = 0; iter < kMaxNewton && fn > kConvergeTol; ++iter) {
    Eigen::MatrixXd big(dim + 1, dim + 1);
    big.topLeftCorner(dim, dim) =
        sector_jacobian(sector, branch, state.omega, state.coeffs, disc);
    for (int c = 0; c < nk; ++c) {
      const int j = harmonic_of(sector, c - sector.k_max);
      big.col(dim).segment(c * nr, nr) =
          -static_cast<double>(j - sector.m0) * state.coeffs[c];
    }
    big.row(dim).head(dim) = f.transpose();
    big(dim, dim) = 0.0;

    Eigen::VectorXd rhs(dim + 1);
    rhs.head(dim) = -g;
    rhs(dim) = -con;
    const Eigen::VectorXd dx = big.partialPivLu().solve(rhs);

    double step = 1.0;
    bool accepted = false;
    for (int h = 0; h < kMaxHalvings; ++h, step *= 0.5) {
      SolveState trial = state;
      for (int c = 0; c < nk; ++c)
        trial.coeffs[c] += step * dx.segment(c * nr, nr);
      trial.omega += step * dx(dim);
      const Eigen::VectorXd gt =
          assemble_g(sector, branch, trial.omega, trial.coeffs, disc);
      const double cont = f.dot(stack_coeffs(trial.coeffs)) - target;
      const double fnt = combined_norm(gt, cont);
      if (fnt <= (1.0 - 1e-4 * step) * fn) {
        state = trial;
        g = gt;
        con = cont;
        fn = fnt;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  state.residual = g.norm();
  return fn <= kAcceptTol;
}

SecondaryBranchPoint record_point(const DihedralSector& sector,
                                  const PrimaryBranchPoint& branch,
                                  const SolveState& state,
                                  const Eigen::VectorXd& f, double b,
                                  const RadialDiscretization& disc) {
  SecondaryBranchPoint pt;
  pt.m0 = sector.m0;
  pt.m = sector.m;
  pt.q = sector.q;
  pt.k_max = sector.k_max;
  pt.a = branch.a;
  pt.b = b;
  pt.omega = state.omega;
  pt.coeffs = state.coeffs;
  pt.constraint_vector = f;
  pt.constraint_value = f.dot(stack_coeffs(state.coeffs));
  pt.residual = state.residual;

  const EigenSolution eig = symmetric_eigensolve(
      sector_jacobian(sector, branch, state.omega, state.coeffs, disc));
  pt.morse = 0;
  pt.jacobian_margin = std::abs(eig.values(0));
  for (int i = 0; i < eig.values.size(); ++i) {
    if (eig.values(i) < -kNegativeBand) ++pt.morse;
    pt.jacobian_margin = std::min(pt.jacobian_margin, std::abs(eig.values(i)));
  }

  std::vector<Eigen::VectorXd> zero(
      state.coeffs.size(), Eigen::VectorXd::Zero(sector.n_radial));
  const EigenSolution base = symmetric_eigensolve(
      sector_jacobian(sector, branch, state.omega, zero, disc));
  pt.primary_morse = 0;
  for (int i = 0; i < base.values.size(); ++i)
    if (base.values(i) < -kNegativeBand) ++pt.primary_morse;
  return pt;
}

int sector_morse(const DihedralSector& sector,
                 const PrimaryBranchPoint& branch, const SolveState& state,
                 const RadialDiscretization& disc) {
  const EigenSolution eig = symmetric_eigensolve(
      sector_jacobian(sector, branch, state.omega, state.coeffs, disc));
  int count = 0;
  for (int i = 0; i < eig.values.size(); ++i)
    if (eig.values(i) < -kNegativeBand) ++count;
  return count;
}

// Advance the converged state to the target amplitude, bisecting the step
// when Newton fails; scale maps grid amplitudes to constraint targets.
// Two step guards reject a Newton run that left the branch: a drift of the
// symmetric component by a sizeable fraction of the profile norm (the nearby
// solution with the carrier annihilated), and a Morse-count jump, tolerated
// only once the step has already been halved several times.  morse < 0 marks
// the count as unset (first lift-off from the degenerate crossing).
void advance(const DihedralSector& sector, const PrimaryBranchPoint& branch,
             const Eigen::VectorXd& f, double scale, SolveState& state,
             int& morse, double b_from, double b_to,
             const RadialDiscretization& disc, int depth) {
  SolveState trial = state;
  const int nr = sector.n_radial;
  const double bump = scale * (b_to - b_from);
  for (int c = 0; c < static_cast<int>(trial.coeffs.size()); ++c)
    trial.coeffs[c] += bump * f.segment(c * nr, nr);
  bool ok = newton_solve(sector, branch, f, scale * b_to, trial, disc);
  if (ok) {
    const double drift =
        (trial.coeffs[sector.k_max] - state.coeffs[sector.k_max]).norm();
    if (drift > 0.5 * branch.coeffs.norm() + std::abs(bump)) ok = false;
  }
  int trial_morse = -1;
  if (ok) {
    trial_morse = sector_morse(sector, branch, trial, disc);
    if (morse >= 0 && trial_morse != morse && depth < kMorseGuardDepth)
      ok = false;
  }
  if (ok) {
    state = trial;
    morse = trial_morse;
    return;
  }
  if (depth >= kMaxSplitDepth) {
    std::ostringstream msg;
    msg << "secondary branch: Newton stalled between amplitudes " << b_from
        << " and " << b_to;
    throw std::runtime_error(msg.str());
  }
  const double mid = 0.5 * (b_from + b_to);
  advance(sector, branch, f, scale, state, morse, b_from, mid, disc,
          depth + 1);
  advance(sector, branch, f, scale, state, morse, mid, b_to, disc, depth + 1);
}

std::vector<SecondaryBranchPoint> march(const DihedralSector& sector,
                                        const PrimaryBranchPoint& branch,
                                        const CrossingResult& crossing,
                                        const std::vector<double>& b_grid,
                                        double scale,
                                        const RadialDiscretization& disc) {
  const Eigen::VectorXd f = constraint_direction(sector, crossing);
  SolveState state;
  state.omega = crossing.omega_star;
  state.coeffs.assign(2 * sector.k_max + 1,
                      Eigen::VectorXd::Zero(sector.n_radial));
  int morse = -1;
  double b_prev = 0.0;
  std::vector<SecondaryBranchPoint> points;
  points.reserve(b_grid.size());
  for (double b : b_grid) {
    advance(sector, branch, f, scale, state, morse, b_prev, b, disc, 0);
    points.push_back(record_point(sector, branch, state, f, b, disc));
    b_prev = b;
  }
  return points;
}

// Eigen-expansion values of one harmonic at the sample radii: the plain
// values and the values weighted by the oscillator eigenvalues, giving the
// exact action of -Delta_j + r^2 on the expansion.
struct HarmonicSamples {
  int j = 0;
  Eigen::VectorXd value;
  Eigen::VectorXd lap_action;
};

HarmonicSamples sample_harmonic(int j, const Eigen::VectorXd& coeffs,
                                const std::vector<double>& radii) {
  const int nr = static_cast<int>(coeffs.size());
  const Eigen::MatrixXd table =
      eigenfunction_values(std::abs(j), nr, radii);
  Eigen::VectorXd weighted(nr);
  for (int n = 0; n < nr; ++n)
    weighted(n) = 2.0 * (std::abs(j) + 2 * n + 1) * coeffs(n);
  HarmonicSamples s;
  s.j = j;
  s.value = table.transpose() * coeffs;
  s.lap_action = table.transpose() * weighted;
  return s;
}

}  // namespace

DihedralSector make_sector(int m0, int m, int k_max,
                           const RadialDiscretization& disc) {
  if (m0 < 1) throw std::invalid_argument("make_sector: m0 < 1");
  if (m <= m0) throw std::invalid_argument("make_sector: need m > m0");
  if (k_max < 2) throw std::invalid_argument("make_sector: k_max < 2");
  DihedralSector sector;
  sector.m0 = m0;
  sector.m = m;
  sector.q = m - m0;
  sector.k_max = k_max;
  sector.n_radial = disc.n_radial;
  if (m0 + k_max * sector.q > disc.m_abs_max) {
    std::ostringstream msg;
    msg << "make_sector: harmonic " << m0 + k_max * sector.q
        << " beyond discretization tables (m_abs_max = " << disc.m_abs_max
        << ")";
    throw std::out_of_range(msg.str());
  }
  for (int k = -k_max; k <= k_max; ++k)
    sector.harmonics.push_back(m0 + k * sector.q);
  return sector;
}

Eigen::VectorXd assemble_g(const DihedralSector& sector,
                           const PrimaryBranchPoint& branch, double omega_rot,
                           const std::vector<Eigen::VectorXd>& coeffs,
                           const RadialDiscretization& disc) {
  check_coeffs(sector, coeffs);
  const int kk = sector.k_max;
  const int nr = sector.n_radial;
  const Eigen::ArrayXd psi =
      branch_profile(branch, disc).array();
  const Eigen::ArrayXd psi2 = psi.square();
  const NodeProducts p = node_products(sector, coeffs, disc);

  Eigen::VectorXd g((2 * kk + 1) * nr);
  for (int k = -kk; k <= kk; ++k) {
    const int j = harmonic_of(sector, k);
    const int ma = std::abs(j);
    Eigen::ArrayXd cubic = Eigen::ArrayXd::Zero(psi.size());
    for (int k3 = -kk; k3 <= kk; ++k3)
      cubic += p.t[k + k3 + 2 * kk] * p.v[k3 + kk];
    const Eigen::ArrayXd nodes = 2.0 * psi2 * p.v[k + kk] +
                                 psi2 * p.v[-k + kk] +
                                 psi * (p.t[k + 2 * kk] + 2.0 * p.aa[k + 2 * kk]) +
                                 cubic;
    Eigen::VectorXd gk = project_quartic(disc, ma, nodes.matrix());
    for (int n = 0; n < nr; ++n)
      gk(n) += diagonal_entry(sector, branch, omega_rot, j, n) *
               coeffs[k + kk](n);
    g.segment((k + kk) * nr, nr) = gk;
  }
  return g;
}

Eigen::MatrixXd sector_jacobian(const DihedralSector& sector,
                                const PrimaryBranchPoint& branch,
                                double omega_rot,
                                const std::vector<Eigen::VectorXd>& coeffs,
                                const RadialDiscretization& disc) {
  check_coeffs(sector, coeffs);
  const int kk = sector.k_max;
  const int nr = sector.n_radial;
  const int nq = static_cast<int>(disc.quartic_rule.nodes.size());
  const Eigen::ArrayXd psi = branch_profile(branch, disc).array();
  const Eigen::ArrayXd psi2 = psi.square();
  const NodeProducts p = node_products(sector, coeffs, disc);
  const Eigen::ArrayXd zero = Eigen::ArrayXd::Zero(nq);
  auto v_or_zero = [&](int k) -> const Eigen::ArrayXd& {
    return std::abs(k) <= kk ? p.v[k + kk] : zero;
  };

  Eigen::MatrixXd jac((2 * kk + 1) * nr, (2 * kk + 1) * nr);
  for (int k = -kk; k <= kk; ++k)
    for (int k2 = k; k2 <= kk; ++k2) {
      Eigen::ArrayXd pot = 2.0 * p.aa[k - k2 + 2 * kk] + p.t[k + k2 + 2 * kk] +
                           2.0 * psi *
                               (v_or_zero(k - k2) + v_or_zero(k2 - k) +
                                v_or_zero(k + k2));
      if (k == k2) pot += 2.0 * psi2;
      if (k + k2 == 0) pot += psi2;
      const int j = harmonic_of(sector, k);
      const int j2 = harmonic_of(sector, k2);
      Eigen::MatrixXd block =
          assemble_multiplication(pot.matrix(), j, j2, disc);
      if (k == k2)
        for (int n = 0; n < nr; ++n)
          block(n, n) += diagonal_entry(sector, branch, omega_rot, j, n);
      jac.block((k + kk) * nr, (k2 + kk) * nr, nr, nr) = block;
      if (k2 != k)
        jac.block((k2 + kk) * nr, (k + kk) * nr, nr, nr) = block.transpose();
    }
  return jac;
}

SecondaryBranchPoint predictor(const DihedralSector& sector,
                               const PrimaryBranchPoint& branch,
                               const CrossingResult& crossing, double b,
                               const RadialDiscretization& disc) {
  const Eigen::VectorXd f = constraint_direction(sector, crossing);
  SolveState state;
  state.omega = crossing.omega_star;
  state.coeffs = split_coeffs(b * f, 2 * sector.k_max + 1, sector.n_radial);
  state.residual =
      assemble_g(sector, branch, state.omega, state.coeffs, disc).norm();
  return record_point(sector, branch, state, f, b, disc);
}

std::vector<SecondaryBranchPoint> continue_secondary(
    const DihedralSector& sector, const PrimaryBranchPoint& branch,
    const BifurcationPoint& curve, const std::vector<double>& b_grid,
    const RadialDiscretization& disc) {
  if (curve.m != sector.m || branch.m0 != sector.m0)
    throw std::invalid_argument(
        "continue_secondary: curve does not belong to this sector");
  if (curve.resonant)
    throw std::invalid_argument(
        "continue_secondary: resonant curve needs a reduced analysis first");
  const CrossingResult crossing = detect_curve(curve, branch, disc);
  return march(sector, branch, crossing, b_grid, 1.0, disc);
}

std::vector<SecondaryBranchPoint> last_curve_continue(
    int m0, double a, const std::vector<double>& b_grid, int k_max,
    const RadialDiscretization& disc) {
  const PrimaryBranchPoint branch = solve_primary(m0, a, disc);
  const DihedralSector sector = make_sector(m0, m0 + 1, k_max, disc);
  const CrossingResult crossing = detect_last_crossing(branch, disc);
  return march(sector, branch, crossing, b_grid, a, disc);
}

std::complex<double> sector_field(const SecondaryBranchPoint& point,
                                  const PrimaryBranchPoint& branch,
                                  const RadialDiscretization& disc, double r,
                                  double theta, double rotate) {
  (void)disc;
  const int kk = point.k_max;
  std::complex<double> u(0.0, 0.0);
  const double angle = theta - rotate;
  for (int k = -kk; k <= kk; ++k) {
    const int j = point.m0 + k * point.q;
    Eigen::VectorXd c = point.coeffs[k + kk];
    if (k == 0) c += branch.coeffs;
    double radial = 0.0;
    for (int n = 0; n < c.size(); ++n)
      radial += c(n) * eigenfunction_value(ModeIndex{j, n}, r);
    u += radial * std::polar(1.0, j * angle);
  }
  return u;
}

double stationary_residual(const SecondaryBranchPoint& point,
                           const PrimaryBranchPoint& branch,
                           const RadialDiscretization& disc,
                           const std::vector<double>& radii,
                           const std::vector<double>& angles,
                           double rotate) {
  (void)disc;
  const int kk = point.k_max;
  std::vector<HarmonicSamples> hs;
  double max_freq = 0.0;
  for (int k = -kk; k <= kk; ++k) {
    const int j = point.m0 + k * point.q;
    Eigen::VectorXd c = point.coeffs[k + kk];
    if (k == 0) c += branch.coeffs;
    hs.push_back(sample_harmonic(j, c, radii));
    max_freq = std::max(
        max_freq, std::abs(branch.omega + point.omega * (j - point.m0)));
  }

  double max_defect = 0.0;
  double max_field = 0.0;
  for (std::size_t i = 0; i < radii.size(); ++i)
    for (double theta : angles) {
      std::complex<double> u(0.0, 0.0);
      std::complex<double> linear(0.0, 0.0);
      for (const auto& h : hs) {
        const std::complex<double> phase =
            std::polar(1.0, h.j * (theta - rotate));
        u += h.value(static_cast<int>(i)) * phase;
        const double shift =
            branch.omega + point.omega * (h.j - point.m0);
        linear += (h.lap_action(static_cast<int>(i)) -
                   shift * h.value(static_cast<int>(i))) *
                  phase;
      }
      const std::complex<double> defect = linear + std::norm(u) * u;
      max_defect = std::max(max_defect, std::abs(defect));
      max_field = std::max(max_field, std::abs(u));
    }
  if (max_field == 0.0 || max_freq == 0.0) return max_defect;
  return max_defect / (max_field * max_freq);
}

double symmetry_defect(const SecondaryBranchPoint& point,
                       const RadialDiscretization& disc,
                       const std::vector<double>& radii,
                       const std::vector<double>& angles) {
  (void)disc;
  const int kk = point.k_max;
  std::vector<HarmonicSamples> hs;
  for (int k = -kk; k <= kk; ++k) {
    const int j = point.m0 + k * point.q;
    hs.push_back(sample_harmonic(j, point.coeffs[k + kk], radii));
  }
  auto stripped = [&](std::size_t i, double theta) {
    std::complex<double> phi(0.0, 0.0);
    for (int k = -kk; k <= kk; ++k)
      phi += hs[k + kk].value(static_cast<int>(i)) *
             std::polar(1.0, k * point.q * theta);
    return phi;
  };
  const double period = 2.0 * std::numbers::pi / point.q;
  double defect = 0.0;
  for (std::size_t i = 0; i < radii.size(); ++i)
    for (double theta : angles) {
      const std::complex<double> phi = stripped(i, theta);
      defect = std::max(defect,
                        std::abs(stripped(i, -theta) - std::conj(phi)));
      defect = std::max(defect, std::abs(stripped(i, theta + period) - phi));
    }
  return defect;
}

}  // namespace gpv
