#pragma once

// Galerkin discretization of radial operators -Delta_m + r^2 + V(r) in the
// oscillator eigenbasis, with dense symmetric eigensolves.  A discretization
// owns the quadrature rules and per-|m| basis value tables so repeated
// assemblies share the same grids.

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gpvortex/hermite_basis.hpp"

namespace gpv {

struct RadialDiscretization {
  int n_radial = 48;   // radial modes n = 0..n_radial-1 per angular sector
  int m_abs_max = 0;   // largest |m| with prebuilt tables
  QuadratureRule pair_rule;     // exact for 2-factor basis products
  QuadratureRule quartic_rule;  // exact for 4-factor basis products

  // value tables: row n, column = node index of the corresponding rule
  std::vector<Eigen::MatrixXd> tables_pair;
  std::vector<Eigen::MatrixXd> tables_quartic;

  const Eigen::MatrixXd& modes_pair(int m_abs) const;
  const Eigen::MatrixXd& modes_quartic(int m_abs) const;
};

// n_radial >= 8; rules are sized so that products of four retained basis
// functions (and all their mixed-sector pairings) integrate exactly.
RadialDiscretization make_discretization(int n_radial, int m_abs_max);

struct LinearRadialOperator {
  int m = 0;
  Eigen::MatrixXd matrix;  // symmetric, n_radial x n_radial
  std::string terms;       // names the potential terms included
};

// Diagonal operator -Delta_m + r^2 - shift: entries 2(|m|+2n+1) - shift.
LinearRadialOperator assemble_schrodinger(int m, double shift,
                                          const RadialDiscretization& disc);

// Matrix of multiplication by V between sectors |m_row| and |m_col|:
// M(n,n') = <V e_{|m_col|,n'}, e_{|m_row|,n}>.  V is sampled at the quartic
// rule nodes and must decay like a polynomial times exp(-r^2) for the
// quadrature to be exact; symmetrized when the sectors coincide.
Eigen::MatrixXd assemble_multiplication(const Eigen::VectorXd& v_at_nodes,
                                        int m_row, int m_col,
                                        const RadialDiscretization& disc);

// Values at the quartic nodes of sum_n coeffs[n] e_{|m|,n}.
Eigen::VectorXd synthesize(const RadialDiscretization& disc, int m_abs,
                           const Eigen::VectorXd& coeffs);

// Coefficients <f, e_{|m|,n}> of a function sampled at the quartic nodes;
// exact when f times one basis function integrates under that rule (true
// for any product of up to three retained basis functions).
Eigen::VectorXd project_quartic(const RadialDiscretization& disc, int m_abs,
                                const Eigen::VectorXd& f_at_nodes);

struct EigenSolution {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // orthonormal columns, matching order
};

// Dense self-adjoint solve; throws if any residual ||Ax - lambda x|| exceeds
// 1e-9 * ||A|| or the input is not symmetric.
EigenSolution symmetric_eigensolve(const Eigen::MatrixXd& a);

}  // namespace gpv
