#pragma once

// Second-variation blocks along the symmetric vortex branch.  For each
// angular index m the block acts on coefficient pairs (V, W) in the sectors
// e_{|m|,n} and e_{|m-2m0|,n}:
//     K_m  = [ -Delta_m + r^2 - omega + 2 psi^2 ,  psi^2 ]
//            [  psi^2 , -Delta_{m-2m0} + r^2 - omega + 2 psi^2 ]
//     H_m(Omega) = K_m - Omega (m - m0) diag(+I, -I).
// Eigenvalue crossings of H_m in Omega mark secondary bifurcations.

#include "gpvortex/primary_branch.hpp"
#include "gpvortex/radial_spectral.hpp"

namespace gpv {

struct HessianBlock {
  int m = 0;               // angular index of the first (V) sector
  int m0 = 1;
  double a = 0.0;
  double omega_rot = 0.0;  // rotation frequency Omega
  Eigen::MatrixXd matrix;  // 2 n_radial square, symmetric
  EigenSolution eig;       // cached decomposition of `matrix`
};

// Rotation-independent part (Omega = 0).  Needs tables for both |m| and
// |m - 2 m0|.
HessianBlock assemble_K(int m, const PrimaryBranchPoint& branch,
                        const RadialDiscretization& disc);

HessianBlock assemble_H(int m, const PrimaryBranchPoint& branch, double omega_rot,
                        const RadialDiscretization& disc);

// Eigenvalues below -1e-8; values within 1e-8 of zero are treated as zero
// modes, not negatives.
int negative_count(const HessianBlock& block);
int near_zero_count(const HessianBlock& block);

// Smallest cutoff M such that every block with m > M is positive for the
// given rotation frequency at small amplitude: both sector lower bounds
// (2-Omega)(m-m0) and 2(m-3m0)+Omega(m-m0) must clear a buffer of 12.
int default_m_max(int m0, double omega_rot);

// Negatives of H_{m0} plus twice those of H_m for m0 < m <= m_max (blocks
// below m0 mirror those above).  Throws if the cutoff cannot guarantee
// positivity of the discarded tail.
int full_morse_count(const PrimaryBranchPoint& branch, double omega_rot,
                     int m_max, const RadialDiscretization& disc);

struct KreinData {
  int m = 0;
  double eigenvalue = 0.0;  // the near-zero eigenvalue examined
  double S = 0.0;           // ||V||^2 - ||W||^2 of its normalized eigenvector
};

// Signature of the eigenvector attached to the eigenvalue nearest zero;
// requires that eigenvalue to be within 1e-6.
KreinData krein_signature(const HessianBlock& block);

struct CrossingResult {
  double omega_star = 0.0;  // rotation frequency of the crossing
  double eigenvalue = 0.0;  // tracked eigenvalue there, |.| <= 1e-9
  bool resonant = false;    // a second eigenvalue of the block also vanishes
  KreinData krein;
  Eigen::VectorXd vector;   // normalized kernel vector, V stacked over W
};

// Locate the zero of the eigenvalue branch that continues the zero-amplitude
// mode (m, n) of the W sector, inside [omega_lo, omega_hi].  The branch is
// followed by eigenvector overlap, not by sorted position.  Throws when the
// tracked eigenvalue does not change sign across the bracket.
CrossingResult find_crossing(int m, int n, const PrimaryBranchPoint& branch,
                             double omega_lo, double omega_hi,
                             const RadialDiscretization& disc);

}  // namespace gpv
