#include "gpvortex/hessian_blocks.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace gpv {

namespace {

constexpr double kNearZero = 1e-8;
constexpr double kBuffer = 12.0;

void attach_eigendecomposition(HessianBlock& block) {
  block.eig = symmetric_eigensolve(block.matrix);
}

}  // namespace

HessianBlock assemble_K(int m, const PrimaryBranchPoint& branch,
                        const RadialDiscretization& disc) {
  const int nr = disc.n_radial;
  const int mv = std::abs(m);
  const int mw = std::abs(m - 2 * branch.m0);
  if (mv > disc.m_abs_max || mw > disc.m_abs_max)
    throw std::out_of_range("assemble_K: sector beyond discretization tables");

  HessianBlock block;
  block.m = m;
  block.m0 = branch.m0;
  block.a = branch.a;
  block.omega_rot = 0.0;
  block.matrix = Eigen::MatrixXd::Zero(2 * nr, 2 * nr);

  auto& h = block.matrix;
  h.topLeftCorner(nr, nr) = assemble_schrodinger(mv, branch.omega, disc).matrix;
  h.bottomRightCorner(nr, nr) =
      assemble_schrodinger(mw, branch.omega, disc).matrix;
  if (branch.a != 0.0) {
    Eigen::VectorXd psi2 =
        branch_profile(branch, disc).array().square().matrix();
    h.topLeftCorner(nr, nr) += 2.0 * assemble_multiplication(psi2, mv, mv, disc);
    h.bottomRightCorner(nr, nr) +=
        2.0 * assemble_multiplication(psi2, mw, mw, disc);
    Eigen::MatrixXd coupling = assemble_multiplication(psi2, mv, mw, disc);
    h.topRightCorner(nr, nr) = coupling;
    h.bottomLeftCorner(nr, nr) = coupling.transpose();
  }
  attach_eigendecomposition(block);
  return block;
}

HessianBlock assemble_H(int m, const PrimaryBranchPoint& branch,
                        double omega_rot, const RadialDiscretization& disc) {
  HessianBlock block = assemble_K(m, branch, disc);
  block.omega_rot = omega_rot;
  const int nr = disc.n_radial;
  const double shift = omega_rot * (m - branch.m0);
  if (shift != 0.0) {
    block.matrix.topLeftCorner(nr, nr).diagonal().array() -= shift;
    block.matrix.bottomRightCorner(nr, nr).diagonal().array() += shift;
    attach_eigendecomposition(block);
  }
  return block;
}

int negative_count(const HessianBlock& block) {
  int count = 0;
  for (Eigen::Index i = 0; i < block.eig.values.size(); ++i)
    if (block.eig.values[i] < -kNearZero) ++count;
  return count;
}

int near_zero_count(const HessianBlock& block) {
  int count = 0;
  for (Eigen::Index i = 0; i < block.eig.values.size(); ++i)
    if (std::abs(block.eig.values[i]) <= kNearZero) ++count;
  return count;
}

int default_m_max(int m0, double omega_rot) {
  if (m0 < 1) throw std::invalid_argument("default_m_max: m0 < 1");
  if (std::abs(omega_rot) >= 2.0)
    throw std::invalid_argument("default_m_max: need |Omega| < 2");
  int m = m0 + 1;
  while (!((2.0 - omega_rot) * (m - m0) > kBuffer &&
           2.0 * (m - 3 * m0) + omega_rot * (m - m0) > kBuffer))
    ++m;
  return m;
}

int full_morse_count(const PrimaryBranchPoint& branch, double omega_rot,
                     int m_max, const RadialDiscretization& disc) {
  const int m0 = branch.m0;
  if (m_max <= m0) throw std::invalid_argument("full_morse_count: m_max <= m0");
  // Discarded blocks (m > m_max) are positive definite when their
  // zero-amplitude lower bounds clear the sup of the potential terms.
  double psi2_max = 0.0;
  if (branch.a != 0.0) {
    Eigen::VectorXd psi = branch_profile(branch, disc);
    psi2_max = psi.array().square().maxCoeff();
  }
  const double margin = 3.0 * psi2_max;
  const double bound_v = (2.0 - omega_rot) * (m_max + 1 - m0);
  const double bound_w =
      2.0 * (m_max + 1 - 3 * m0) + omega_rot * (m_max + 1 - m0);
  if (!(bound_v > margin && bound_w > margin)) {
    std::ostringstream msg;
    msg << "full_morse_count: m_max=" << m_max
        << " cannot guarantee positivity of the tail (bounds " << bound_v
        << ", " << bound_w << " vs margin " << margin << ")";
    throw std::invalid_argument(msg.str());
  }
  int count = negative_count(assemble_H(m0, branch, omega_rot, disc));
  for (int m = m0 + 1; m <= m_max; ++m)
    count += 2 * negative_count(assemble_H(m, branch, omega_rot, disc));
  return count;
}

KreinData krein_signature(const HessianBlock& block) {
  Eigen::Index best = 0;
  block.eig.values.cwiseAbs().minCoeff(&best);
  const double value = block.eig.values[best];
  if (std::abs(value) > 1e-6)
    throw std::runtime_error("krein_signature: no eigenvalue near zero");
  const int nr = static_cast<int>(block.eig.vectors.rows()) / 2;
  const Eigen::VectorXd x = block.eig.vectors.col(best).normalized();
  KreinData data;
  data.m = block.m;
  data.eigenvalue = value;
  data.S = x.head(nr).squaredNorm() - x.tail(nr).squaredNorm();
  return data;
}

namespace {

struct TrackedMode {
  double eigenvalue = 0.0;
  Eigen::VectorXd vector;
};

TrackedMode match_mode(const HessianBlock& block,
                       const Eigen::VectorXd& reference) {
  Eigen::Index best = 0;
  double best_overlap = -1.0;
  for (Eigen::Index i = 0; i < block.eig.values.size(); ++i) {
    const double overlap = std::abs(reference.dot(block.eig.vectors.col(i)));
    if (overlap > best_overlap) {
      best_overlap = overlap;
      best = i;
    }
  }
  return {block.eig.values[best], block.eig.vectors.col(best)};
}

}  // namespace

CrossingResult find_crossing(int m, int n, const PrimaryBranchPoint& branch,
                             double omega_lo, double omega_hi,
                             const RadialDiscretization& disc) {
  if (!(omega_lo < omega_hi))
    throw std::invalid_argument("find_crossing: empty bracket");
  if (n < 0 || n >= disc.n_radial)
    throw std::invalid_argument("find_crossing: n outside basis");
  const int nr = disc.n_radial;

  // seed: the pure W-sector mode (m - 2 m0, n), exact at zero amplitude
  Eigen::VectorXd seed = Eigen::VectorXd::Zero(2 * nr);
  seed[nr + n] = 1.0;

  // march across the bracket, carrying the mode by eigenvector overlap,
  // until its eigenvalue changes sign
  const int steps = 48;
  const double h = (omega_hi - omega_lo) / steps;
  Eigen::VectorXd ref = seed;
  double w_prev = omega_lo;
  TrackedMode prev =
      match_mode(assemble_H(m, branch, omega_lo, disc), ref);
  ref = prev.vector;
  double w_lo = omega_lo, w_hi = omega_hi;
  double f_lo = prev.eigenvalue, f_hi = 0.0;
  bool bracketed = false;
  for (int i = 1; i <= steps; ++i) {
    const double w = omega_lo + i * h;
    TrackedMode cur = match_mode(assemble_H(m, branch, w, disc), ref);
    ref = cur.vector;
    if (prev.eigenvalue == 0.0 || cur.eigenvalue * prev.eigenvalue < 0.0) {
      w_lo = w_prev;
      f_lo = prev.eigenvalue;
      w_hi = w;
      f_hi = cur.eigenvalue;
      ref = prev.vector;
      bracketed = true;
      break;
    }
    w_prev = w;
    prev = cur;
  }
  if (!bracketed)
    throw std::runtime_error(
        "find_crossing: tracked eigenvalue does not change sign in bracket");

  // bisection with a secant proposal, re-matching the mode at every probe
  HessianBlock block_star = assemble_H(m, branch, w_lo, disc);
  TrackedMode mode_star = match_mode(block_star, ref);
  double w_star = w_lo;
  for (int it = 0; it < 80; ++it) {
    double w_mid = 0.5 * (w_lo + w_hi);
    if (f_hi != f_lo) {
      const double w_sec = w_lo - f_lo * (w_hi - w_lo) / (f_hi - f_lo);
      if (w_sec > w_lo + 1e-3 * (w_hi - w_lo) &&
          w_sec < w_hi - 1e-3 * (w_hi - w_lo))
        w_mid = w_sec;
    }
    HessianBlock block = assemble_H(m, branch, w_mid, disc);
    TrackedMode cur = match_mode(block, ref);
    ref = cur.vector;
    w_star = w_mid;
    block_star = block;
    mode_star = cur;
    if (std::abs(cur.eigenvalue) <= 1e-9) break;
    if ((cur.eigenvalue < 0.0) == (f_lo < 0.0)) {
      w_lo = w_mid;
      f_lo = cur.eigenvalue;
    } else {
      w_hi = w_mid;
      f_hi = cur.eigenvalue;
    }
  }
  if (std::abs(mode_star.eigenvalue) > 1e-9)
    throw std::runtime_error("find_crossing: refinement stalled");

  CrossingResult result;
  result.omega_star = w_star;
  result.eigenvalue = mode_star.eigenvalue;
  int zeros = 0;
  for (Eigen::Index i = 0; i < block_star.eig.values.size(); ++i)
    if (std::abs(block_star.eig.values[i]) <= kNearZero) ++zeros;
  result.resonant = zeros >= 2;
  result.krein.m = m;
  result.krein.eigenvalue = mode_star.eigenvalue;
  const Eigen::VectorXd x = mode_star.vector.normalized();
  result.krein.S = x.head(nr).squaredNorm() - x.tail(nr).squaredNorm();
  result.vector = x;
  return result;
}

}  // namespace gpv
