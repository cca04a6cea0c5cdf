#include "gpvortex/primary_branch.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace gpv {

double omega_slope(int m0) {
  if (m0 < 1) throw std::invalid_argument("omega_slope: m0 < 1");
  return std::exp(log_factorial(2 * m0) - 2 * m0 * std::log(2.0) -
                  2.0 * log_factorial(m0));
}

namespace {

// Galerkin residual F_n = (lambda_n - omega) c_n + <psi^3, e_n>; the
// bordered system appends the amplitude constraint c_0 - a.
struct NewtonWork {
  Eigen::VectorXd lambda;  // oscillator eigenvalues in the m0 sector
  Eigen::VectorXd residual(const Eigen::VectorXd& c, double omega,
                           const RadialDiscretization& disc, int m0) const {
    Eigen::VectorXd psi = synthesize(disc, m0, c);
    Eigen::VectorXd cubic = psi.array().cube().matrix();
    return (lambda.array() - omega).matrix().cwiseProduct(c) +
           project_quartic(disc, m0, cubic);
  }
};

PrimaryBranchPoint solve_from_guess(int m0, double a,
                                    const RadialDiscretization& disc,
                                    Eigen::VectorXd c, double omega) {
  const int nr = disc.n_radial;
  NewtonWork work;
  work.lambda.resize(nr);
  for (int n = 0; n < nr; ++n)
    work.lambda[n] = oscillator_eigenvalue({m0, n});

  double fnorm = 0.0;
  bool converged = false;
  for (int it = 0; it < 25; ++it) {
    Eigen::VectorXd f = work.residual(c, omega, disc, m0);
    const double gap = c[0] - a;
    fnorm = std::sqrt(f.squaredNorm() + gap * gap);
    if (fnorm <= 1e-10) {
      converged = true;
      break;
    }
    Eigen::VectorXd psi = synthesize(disc, m0, c);
    Eigen::VectorXd psi2 = psi.array().square().matrix();
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(nr + 1, nr + 1);
    j.topLeftCorner(nr, nr) =
        3.0 * assemble_multiplication(psi2, m0, m0, disc);
    j.topLeftCorner(nr, nr).diagonal() += (work.lambda.array() - omega).matrix();
    j.block(0, nr, nr, 1) = -c;
    j(nr, 0) = 1.0;
    Eigen::VectorXd rhs(nr + 1);
    rhs.head(nr) = -f;
    rhs[nr] = -gap;
    Eigen::VectorXd step = j.partialPivLu().solve(rhs);
    c += step.head(nr);
    omega += step[nr];
  }
  if (!converged) {
    std::ostringstream msg;
    msg << "solve_primary: Newton stalled at residual " << fnorm
        << " (m0=" << m0 << ", a=" << a << ")";
    throw std::runtime_error(msg.str());
  }

  PrimaryBranchPoint point;
  point.m0 = m0;
  point.a = a;
  point.omega = omega;
  point.coeffs = c;
  point.residual = fnorm;
  Eigen::VectorXd psi = synthesize(disc, m0, c);
  point.positive = true;
  for (Eigen::Index k = 0; k < psi.size(); ++k) {
    if (disc.quartic_rule.nodes[k] > 6.0) break;  // tail is numerically zero
    if (a > 0.0 && psi[k] <= 0.0) point.positive = false;
  }
  return point;
}

}  // namespace

PrimaryBranchPoint solve_primary(int m0, double a,
                                 const RadialDiscretization& disc) {
  if (m0 < 1) throw std::invalid_argument("solve_primary: m0 < 1");
  if (m0 > disc.m_abs_max)
    throw std::out_of_range("solve_primary: m0 beyond discretization tables");
  if (a < 0.0) throw std::invalid_argument("solve_primary: a < 0");

  const int nr = disc.n_radial;
  if (a == 0.0) {
    PrimaryBranchPoint point;
    point.m0 = m0;
    point.a = 0.0;
    point.omega = 2.0 * (m0 + 1);
    point.coeffs = Eigen::VectorXd::Zero(nr);
    point.residual = 0.0;
    point.positive = true;
    return point;
  }
  Eigen::VectorXd c = Eigen::VectorXd::Zero(nr);
  c[0] = a;
  const double omega0 = 2.0 * (m0 + 1) + a * a * omega_slope(m0);
  return solve_from_guess(m0, a, disc, c, omega0);
}

std::vector<PrimaryBranchPoint> continue_branch(
    int m0, const std::vector<double>& a_grid,
    const RadialDiscretization& disc) {
  std::vector<PrimaryBranchPoint> branch;
  branch.reserve(a_grid.size());
  for (std::size_t i = 0; i < a_grid.size(); ++i) {
    if (i > 0 && a_grid[i] <= a_grid[i - 1])
      throw std::invalid_argument("continue_branch: grid must ascend");
    const double a = a_grid[i];
    if (branch.empty() || branch.back().a == 0.0) {
      branch.push_back(solve_primary(m0, a, disc));
      continue;
    }
    const PrimaryBranchPoint& prev = branch.back();
    Eigen::VectorXd c = prev.coeffs * (a / prev.a);
    const double omega = 2.0 * (m0 + 1) +
                         (prev.omega - 2.0 * (m0 + 1)) * (a * a) /
                             (prev.a * prev.a);
    branch.push_back(solve_from_guess(m0, a, disc, c, omega));
  }
  return branch;
}

Eigen::VectorXd branch_profile(const PrimaryBranchPoint& point,
                               const RadialDiscretization& disc) {
  return synthesize(disc, point.m0, point.coeffs);
}

}  // namespace gpv
