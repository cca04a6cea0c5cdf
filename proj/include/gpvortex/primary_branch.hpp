#pragma once

// Newton continuation of the radially symmetric vortex profile: solve
//     -Delta_{m0} psi + r^2 psi + psi^3 = omega psi
// in the Galerkin basis {e_{m0,n}}, parameterized by the amplitude
// a = <psi, e_{m0,0}>, with the frequency omega as the extra unknown.

#include <vector>

#include <Eigen/Dense>

#include "gpvortex/radial_spectral.hpp"

namespace gpv {

struct PrimaryBranchPoint {
  int m0 = 1;              // vortex charge, >= 1
  double a = 0.0;          // amplitude <psi, e_{m0,0}>
  double omega = 0.0;      // nonlinear frequency
  Eigen::VectorXd coeffs;  // psi in the basis {e_{m0,n}}, n < n_radial
  double residual = 0.0;   // 2-norm of the Galerkin residual at the solution
  bool positive = true;    // psi > 0 on the interior quadrature nodes
};

// d(omega)/d(a^2) at a=0: the quartic self-overlap (2 m0)!/(4^{m0} (m0!)^2).
double omega_slope(int m0);

// Solve at fixed amplitude; the zero-amplitude point is exact with
// omega = 2(m0+1).  Throws on Newton divergence (message carries the last
// residual); positivity violation only clears the flag.
PrimaryBranchPoint solve_primary(int m0, double a,
                                 const RadialDiscretization& disc);

// Warm-started sweep over an ascending amplitude grid starting at 0.
std::vector<PrimaryBranchPoint> continue_branch(
    int m0, const std::vector<double>& a_grid,
    const RadialDiscretization& disc);

// psi evaluated at the quartic-rule nodes of the discretization.
Eigen::VectorXd branch_profile(const PrimaryBranchPoint& point,
                               const RadialDiscretization& disc);

}  // namespace gpv
