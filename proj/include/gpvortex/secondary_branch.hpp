#pragma once

// Continuation of the branches that split off the symmetric vortex profile.
// Work happens in the fixed-point space of the dihedral group of order
// q = m - m0: the field keeps angular harmonics j = m0 + k q with real
// radial coefficients, the crossing frequency joins the unknowns, and a
// scalar amplitude constraint selects one point per branch.  Newton steps
// use the exact sector Jacobian; products are evaluated at quadrature nodes
// with the angular convolutions truncated to the retained harmonics.

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "gpvortex/bifurcation_atlas.hpp"
#include "gpvortex/hessian_blocks.hpp"

namespace gpv {

struct DihedralSector {
  int m0 = 0;
  int m = 0;       // bifurcation block
  int q = 0;       // dihedral order m - m0
  int k_max = 0;   // retained harmonics j = m0 + k q, |k| <= k_max
  std::vector<int> harmonics;  // ascending in k
  int n_radial = 0;
};

// k_max >= 2; every retained |j| must be covered by the discretization.
DihedralSector make_sector(int m0, int m, int k_max,
                           const RadialDiscretization& disc);

struct SecondaryBranchPoint {
  int m0 = 0;
  int m = 0;
  int q = 0;
  int k_max = 0;
  double a = 0.0;      // primary amplitude the branch hangs off
  double b = 0.0;      // branch amplitude along the crossing mode
  double omega = 0.0;  // rotation frequency of this point
  std::vector<Eigen::VectorXd> coeffs;  // per k = -k_max..k_max
  Eigen::VectorXd constraint_vector;    // stacked crossing mode f
  double constraint_value = 0.0;        // achieved <v, f>
  double residual = 0.0;                // sector residual norm
  int morse = 0;                        // sector Jacobian negatives
  int primary_morse = 0;  // sector negatives on the trivial branch, same omega
  double jacobian_margin = 0.0;  // smallest |eigenvalue| of the Jacobian
};

// Sector residual of the perturbation v around the symmetric profile:
// for each retained harmonic, (lambda - omega_branch - Omega (j - m0)) V_j
// plus the projected quadratic and cubic couplings through the profile.
// coeffs holds one real vector per k, ascending, each of length n_radial.
Eigen::VectorXd assemble_g(const DihedralSector& sector,
                           const PrimaryBranchPoint& branch, double omega_rot,
                           const std::vector<Eigen::VectorXd>& coeffs,
                           const RadialDiscretization& disc);

// Symmetric Jacobian of assemble_g in the coefficients; at v = 0 it is the
// direct sum of the per-harmonic Hessian pairings.
Eigen::MatrixXd sector_jacobian(const DihedralSector& sector,
                                const PrimaryBranchPoint& branch,
                                double omega_rot,
                                const std::vector<Eigen::VectorXd>& coeffs,
                                const RadialDiscretization& disc);

// Starting point on the bifurcating branch: b times the crossing's kernel
// mode placed at k = +-1, frequency at the crossing.  Refuses resonant
// crossings (the continuation needs a simple kernel).
SecondaryBranchPoint predictor(const DihedralSector& sector,
                               const PrimaryBranchPoint& branch,
                               const CrossingResult& crossing, double b,
                               const RadialDiscretization& disc);

// March the branch over the given amplitudes, locating the crossing first.
// Newton failures trigger amplitude sub-stepping before giving up.
std::vector<SecondaryBranchPoint> continue_secondary(
    const DihedralSector& sector, const PrimaryBranchPoint& branch,
    const BifurcationPoint& curve, const std::vector<double>& b_grid,
    const RadialDiscretization& disc);

// Branch off the final crossing below the rotation ceiling (q = 1); the
// amplitude constraint scales with a, so coefficients run at a * b.
std::vector<SecondaryBranchPoint> last_curve_continue(
    int m0, double a, const std::vector<double>& b_grid, int k_max,
    const RadialDiscretization& disc);

// Reconstructed rotating-frame field psi e^{i m0 theta} + v at one point;
// rotate shifts the whole configuration by that angle first.
std::complex<double> sector_field(const SecondaryBranchPoint& point,
                                  const PrimaryBranchPoint& branch,
                                  const RadialDiscretization& disc, double r,
                                  double theta, double rotate = 0.0);

// Sup-norm residual of the reconstructed field in the stationary equation,
// sampled off-grid and scaled by the field size times the largest shifted
// frequency; the linear action is evaluated through the eigen-expansion, so
// this check is independent of the Galerkin assembly.
double stationary_residual(const SecondaryBranchPoint& point,
                           const PrimaryBranchPoint& branch,
                           const RadialDiscretization& disc,
                           const std::vector<double>& radii,
                           const std::vector<double>& angles,
                           double rotate = 0.0);

// Largest defect of the dihedral symmetry of the stripped profile
// sum_k V_k e^{i k q theta}: reflection conjugacy and 2 pi / q periodicity.
double symmetry_defect(const SecondaryBranchPoint& point,
                       const RadialDiscretization& disc,
                       const std::vector<double>& radii,
                       const std::vector<double>& angles);

}  // namespace gpv
