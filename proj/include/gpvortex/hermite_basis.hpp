#pragma once

// Eigenpairs of the radial harmonic oscillator on (0,inf) with the measure
// r dr, i.e. solutions of
//     -e'' - e'/r + (m^2/r^2 + r^2) e = lambda e,  lambda = 2(|m| + 2n + 1),
// together with Gauss quadrature rules tailored to products of such
// functions.  Everything here is pure and safe to call concurrently.

#include <vector>

#include <Eigen/Dense>

namespace gpv {

struct ModeIndex {
  int m = 0;  // angular index, may be negative
  int n = 0;  // radial quantum number, n >= 0
};

// lambda_{m,n} = 2(|m| + 2n + 1)
int oscillator_eigenvalue(ModeIndex mode);

double log_factorial(int k);

// <e_{a,0}^2, e_{b,0}^2> = (a+b)! / (a! b! 2^{a+b}), evaluated in log space
double pair_overlap_closed(int a, int b);

// e_{m,n}(r) = p(r) exp(-r^2/2) with p a polynomial of degree |m|+2n whose
// lowest-order coefficient (of r^{|m|}) is positive.
struct HermiteGaussFn {
  ModeIndex mode;
  std::vector<double> poly;  // poly[i] multiplies r^i

  double polynomial_part(double r) const;
  double operator()(double r) const;
  double derivative(double r) const;
};

// Monomial coefficients lose accuracy to cancellation once |m|+2n gets large;
// keep this for closed-form work at low degree and use the value tables below
// for assembly.
HermiteGaussFn build_eigenfunction(ModeIndex mode);

// Single value of e_{m,n}(r) by the normalized three-term recurrence; stable
// for any n because every intermediate stays O(1).
double eigenfunction_value(ModeIndex mode, double r);

// Table of e_{|m|,n}(r_k), n = 0..count-1 down the rows, nodes across columns.
Eigen::MatrixXd eigenfunction_values(int m_abs, int count,
                                     const std::vector<double>& r);

// d/dr e_{|m|,n}(r_k); all nodes must be positive.
Eigen::MatrixXd eigenfunction_derivatives(int m_abs, int count,
                                          const std::vector<double>& r);

// Rule for integrals of the form  int_0^inf q(r^2) exp(-power r^2) r dr
// with q a polynomial; exact (to roundoff) for deg q <= exact_t_degree.
// Products of two eigenfunctions need power 1, products of four need
// power 2.  Weights absorb nothing: integrate() sums w_k f(r_k) for the
// full integrand f including its Gaussian.
struct QuadratureRule {
  int gaussian_power = 2;
  int exact_t_degree = 0;
  std::vector<double> nodes;    // radii, ascending
  std::vector<double> weights;

  double integrate(const std::vector<double>& f_at_nodes) const;
  double integrate(const Eigen::VectorXd& f_at_nodes) const;
};

// Node count is t_degree/2 + 2, exceeding the Gauss exactness threshold.
QuadratureRule radial_rule(int gaussian_power, int t_degree);

// <e_a e_b, e_c e_d> over r dr.  The default rule is sized from the four
// degrees; pass one explicitly to reuse nodes across many calls.
double quartic_overlap(ModeIndex a, ModeIndex b, ModeIndex c, ModeIndex d);
double quartic_overlap(ModeIndex a, ModeIndex b, ModeIndex c, ModeIndex d,
                       const QuadratureRule& rule);

// Weighted norm of the oscillator-equation residual for a candidate
// eigenfunction, using centered finite differences for the derivatives.
double ode_residual(ModeIndex mode);

}  // namespace gpv
