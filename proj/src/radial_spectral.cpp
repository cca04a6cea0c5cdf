#include "gpvortex/radial_spectral.hpp"

#include <cmath>
#include <stdexcept>

namespace gpv {

const Eigen::MatrixXd& RadialDiscretization::modes_pair(int m_abs) const {
  if (m_abs < 0 || m_abs > m_abs_max)
    throw std::out_of_range("RadialDiscretization: |m| beyond table range");
  return tables_pair[m_abs];
}

const Eigen::MatrixXd& RadialDiscretization::modes_quartic(int m_abs) const {
  if (m_abs < 0 || m_abs > m_abs_max)
    throw std::out_of_range("RadialDiscretization: |m| beyond table range");
  return tables_quartic[m_abs];
}

RadialDiscretization make_discretization(int n_radial, int m_abs_max) {
  if (n_radial < 8)
    throw std::invalid_argument("make_discretization: n_radial < 8");
  if (m_abs_max < 0)
    throw std::invalid_argument("make_discretization: m_abs_max < 0");
  RadialDiscretization disc;
  disc.n_radial = n_radial;
  disc.m_abs_max = m_abs_max;
  // Largest single-factor r-degree is m_abs_max + 2(n_radial-1); four factors
  // halve to t = r^2 (or 2r^2) degree 2*(that), two factors to 1*(that).
  const int top = m_abs_max + 2 * (n_radial - 1);
  disc.pair_rule = radial_rule(1, top + 2);
  disc.quartic_rule = radial_rule(2, 2 * top + 2);
  disc.tables_pair.reserve(m_abs_max + 1);
  disc.tables_quartic.reserve(m_abs_max + 1);
  for (int m = 0; m <= m_abs_max; ++m) {
    disc.tables_pair.push_back(
        eigenfunction_values(m, n_radial, disc.pair_rule.nodes));
    disc.tables_quartic.push_back(
        eigenfunction_values(m, n_radial, disc.quartic_rule.nodes));
  }
  return disc;
}

LinearRadialOperator assemble_schrodinger(int m, double shift,
                                          const RadialDiscretization& disc) {
  if (std::abs(m) > disc.m_abs_max)
    throw std::out_of_range("assemble_schrodinger: |m| beyond table range");
  LinearRadialOperator op;
  op.m = m;
  op.terms = "oscillator";
  op.matrix = Eigen::MatrixXd::Zero(disc.n_radial, disc.n_radial);
  for (int n = 0; n < disc.n_radial; ++n)
    op.matrix(n, n) = oscillator_eigenvalue({m, n}) - shift;
  return op;
}

Eigen::MatrixXd assemble_multiplication(const Eigen::VectorXd& v_at_nodes,
                                        int m_row, int m_col,
                                        const RadialDiscretization& disc) {
  const auto& rule = disc.quartic_rule;
  if (static_cast<std::size_t>(v_at_nodes.size()) != rule.nodes.size())
    throw std::invalid_argument("assemble_multiplication: node count mismatch");
  const Eigen::MatrixXd& er = disc.modes_quartic(std::abs(m_row));
  const Eigen::MatrixXd& ec = disc.modes_quartic(std::abs(m_col));
  Eigen::VectorXd wv(v_at_nodes.size());
  for (Eigen::Index k = 0; k < wv.size(); ++k)
    wv[k] = rule.weights[k] * v_at_nodes[k];
  Eigen::MatrixXd out = er * wv.asDiagonal() * ec.transpose();
  if (std::abs(m_row) == std::abs(m_col))
    out = 0.5 * (out + out.transpose()).eval();
  return out;
}

Eigen::VectorXd synthesize(const RadialDiscretization& disc, int m_abs,
                           const Eigen::VectorXd& coeffs) {
  if (coeffs.size() != disc.n_radial)
    throw std::invalid_argument("synthesize: coefficient count mismatch");
  return disc.modes_quartic(m_abs).transpose() * coeffs;
}

Eigen::VectorXd project_quartic(const RadialDiscretization& disc, int m_abs,
                                const Eigen::VectorXd& f_at_nodes) {
  const auto& rule = disc.quartic_rule;
  if (static_cast<std::size_t>(f_at_nodes.size()) != rule.nodes.size())
    throw std::invalid_argument("project_quartic: node count mismatch");
  Eigen::VectorXd wf(f_at_nodes.size());
  for (Eigen::Index k = 0; k < wf.size(); ++k)
    wf[k] = rule.weights[k] * f_at_nodes[k];
  return disc.modes_quartic(m_abs) * wf;
}

EigenSolution symmetric_eigensolve(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols())
    throw std::invalid_argument("symmetric_eigensolve: matrix not square");
  const double scale = a.norm();
  if ((a - a.transpose()).norm() > 1e-12 * (1.0 + scale))
    throw std::invalid_argument("symmetric_eigensolve: matrix not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("symmetric_eigensolve: no convergence");
  EigenSolution sol{es.eigenvalues(), es.eigenvectors()};
  const double res =
      (a * sol.vectors - sol.vectors * sol.values.asDiagonal()).norm();
  if (res > 1e-9 * (1.0 + scale))
    throw std::runtime_error("symmetric_eigensolve: residual too large");
  return sol;
}

}  // namespace gpv
