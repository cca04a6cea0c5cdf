#include "gpvortex/hermite_basis.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace gpv {

int oscillator_eigenvalue(ModeIndex mode) {
  if (mode.n < 0) throw std::invalid_argument("oscillator_eigenvalue: n < 0");
  return 2 * (std::abs(mode.m) + 2 * mode.n + 1);
}

double log_factorial(int k) { return std::lgamma(static_cast<double>(k) + 1.0); }

double pair_overlap_closed(int a, int b) {
  return std::exp(log_factorial(a + b) - log_factorial(a) - log_factorial(b) -
                  (a + b) * std::log(2.0));
}

double HermiteGaussFn::polynomial_part(double r) const {
  double v = 0.0;
  for (std::size_t i = poly.size(); i-- > 0;) v = v * r + poly[i];
  return v;
}

double HermiteGaussFn::operator()(double r) const {
  return polynomial_part(r) * std::exp(-0.5 * r * r);
}

double HermiteGaussFn::derivative(double r) const {
  double dp = 0.0;
  for (std::size_t i = poly.size(); i-- > 1;)
    dp = dp * r + static_cast<double>(i) * poly[i];
  return (dp - r * polynomial_part(r)) * std::exp(-0.5 * r * r);
}

HermiteGaussFn build_eigenfunction(ModeIndex mode) {
  const int a = std::abs(mode.m);
  const int n = mode.n;
  if (n < 0) throw std::invalid_argument("build_eigenfunction: n < 0");
  HermiteGaussFn fn;
  fn.mode = mode;
  fn.poly.assign(a + 2 * n + 1, 0.0);
  // p(r) = sqrt(2 n!/(n+a)!) r^a L_n^{(a)}(r^2), expanded in monomials:
  // coefficient of r^{a+2k} is sqrt(...) (-1)^k binom(n+a, n-k) / k!
  const double log_norm =
      0.5 * (std::log(2.0) + log_factorial(n) - log_factorial(n + a));
  for (int k = 0; k <= n; ++k) {
    const double log_c = log_norm + log_factorial(n + a) -
                         log_factorial(n - k) - log_factorial(a + k) -
                         log_factorial(k);
    fn.poly[a + 2 * k] = ((k % 2) ? -1.0 : 1.0) * std::exp(log_c);
  }
  return fn;
}

namespace {

// Orthonormal weighted Laguerre functions in t: rows n = 0..count-1 of
// phi_n(t) = sqrt(n!/(n+alpha)!) t^{alpha/2} L_n^{(alpha)}(t) exp(-t/2).
// Row 0 seeds in log space; the normalized recurrence keeps all later rows
// O(1), so no scaling tricks are needed.
void weighted_laguerre_rows(int alpha, int count, const std::vector<double>& t,
                            Eigen::MatrixXd& out) {
  const int cols = static_cast<int>(t.size());
  out.resize(count, cols);
  for (int c = 0; c < cols; ++c) {
    const double tc = t[c];
    double p0;
    if (tc <= 0.0) {
      p0 = (alpha == 0) ? 1.0 : 0.0;
    } else {
      p0 = std::exp(0.5 * (alpha * std::log(tc) - tc) -
                    0.5 * log_factorial(alpha));
    }
    out(0, c) = p0;
    if (count == 1) continue;
    double p1 = (alpha + 1.0 - tc) / std::sqrt(alpha + 1.0) * p0;
    out(1, c) = p1;
    for (int k = 1; k + 1 < count; ++k) {
      const double p2 = ((2.0 * k + 1.0 + alpha - tc) * p1 -
                         std::sqrt(double(k) * (k + alpha)) * p0) /
                        std::sqrt(double(k + 1) * (k + 1 + alpha));
      p0 = p1;
      p1 = p2;
      out(k + 1, c) = p1;
    }
  }
}

}  // namespace

Eigen::MatrixXd eigenfunction_values(int m_abs, int count,
                                     const std::vector<double>& r) {
  if (m_abs < 0) throw std::invalid_argument("eigenfunction_values: m_abs < 0");
  std::vector<double> t(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) t[i] = r[i] * r[i];
  Eigen::MatrixXd out;
  weighted_laguerre_rows(m_abs, count, t, out);
  out *= std::sqrt(2.0);
  return out;
}

double eigenfunction_value(ModeIndex mode, double r) {
  const std::vector<double> pt{r};
  return eigenfunction_values(std::abs(mode.m), mode.n + 1, pt)(mode.n, 0);
}

Eigen::MatrixXd eigenfunction_derivatives(int m_abs, int count,
                                          const std::vector<double>& r) {
  for (double ri : r)
    if (!(ri > 0.0))
      throw std::invalid_argument("eigenfunction_derivatives: nodes must be > 0");
  std::vector<double> t(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) t[i] = r[i] * r[i];
  Eigen::MatrixXd phi;
  weighted_laguerre_rows(m_abs, count, t, phi);
  Eigen::MatrixXd out(count, static_cast<int>(r.size()));
  // d/dt phi_n = (alpha/(2t) - 1/2) phi_n + [n phi_n - sqrt(n(n+alpha)) phi_{n-1}]/t,
  // then d/dr e_{m,n} = sqrt(2) * 2r * d/dt phi_n.
  for (int c = 0; c < static_cast<int>(r.size()); ++c) {
    const double tc = t[c];
    for (int n = 0; n < count; ++n) {
      double d = (m_abs / (2.0 * tc) - 0.5) * phi(n, c);
      if (n > 0)
        d += (n * phi(n, c) - std::sqrt(double(n) * (n + m_abs)) * phi(n - 1, c)) / tc;
      out(n, c) = std::sqrt(2.0) * 2.0 * r[c] * d;
    }
  }
  return out;
}

double QuadratureRule::integrate(const std::vector<double>& f) const {
  if (f.size() != nodes.size())
    throw std::invalid_argument("QuadratureRule::integrate: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += weights[i] * f[i];
  return s;
}

double QuadratureRule::integrate(const Eigen::VectorXd& f) const {
  if (static_cast<std::size_t>(f.size()) != nodes.size())
    throw std::invalid_argument("QuadratureRule::integrate: size mismatch");
  double s = 0.0;
  for (Eigen::Index i = 0; i < f.size(); ++i) s += weights[i] * f[i];
  return s;
}

namespace {

// Weighted Laguerre (alpha = 0) values ell_n(t) = L_n(t) exp(-t/2) for a
// single t, returning (ell_{N-1}, ell_N); forward recurrence, O(1) values.
std::pair<double, double> weighted_laguerre_pair(int N, double t) {
  double p0 = std::exp(-0.5 * t);
  double p1 = (1.0 - t) * p0;
  if (N == 0) return {0.0, p0};
  for (int k = 1; k < N; ++k) {
    const double p2 = ((2.0 * k + 1.0 - t) * p1 - k * p0) / (k + 1.0);
    p0 = p1;
    p1 = p2;
  }
  return {p0, p1};
}

}  // namespace

QuadratureRule radial_rule(int gaussian_power, int t_degree) {
  if (gaussian_power != 1 && gaussian_power != 2)
    throw std::invalid_argument("radial_rule: gaussian_power must be 1 or 2");
  const int N = t_degree / 2 + 2;
  // Gauss-Laguerre nodes for weight exp(-t): eigenvalues of the Jacobi
  // matrix (diag 2k+1, offdiag k), then Newton-polished on the weighted
  // Laguerre function so small nodes recover full precision.
  Eigen::VectorXd diag(N), sub(N - 1);
  for (int k = 0; k < N; ++k) diag[k] = 2.0 * k + 1.0;
  for (int k = 1; k < N; ++k) sub[k - 1] = k;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  std::vector<double> t(es.eigenvalues().data(), es.eigenvalues().data() + N);

  for (double& tk : t) {
    for (int it = 0; it < 4; ++it) {
      auto [lm1, l] = weighted_laguerre_pair(N, tk);
      const double dl = -0.5 * l + N * (l - lm1) / tk;  // d/dt of L_N e^{-t/2}
      tk -= l / dl;
    }
  }

  QuadratureRule rule;
  rule.gaussian_power = gaussian_power;
  rule.exact_t_degree = 2 * N - 1;
  rule.nodes.resize(N);
  rule.weights.resize(N);
  const double p = gaussian_power;
  for (int k = 0; k < N; ++k) {
    auto [lN, lN1] = weighted_laguerre_pair(N + 1, t[k]);
    (void)lN;
    // Modified weight w_k e^{t_k} = t_k / ((N+1) L_{N+1}(t_k) e^{-t_k/2})^2;
    // every factor is O(1) so nothing under- or overflows.
    const double what = t[k] / ((N + 1.0) * (N + 1.0) * lN1 * lN1);
    rule.nodes[k] = std::sqrt(t[k] / p);
    rule.weights[k] = what / (2.0 * p);
  }
  return rule;
}

double quartic_overlap(ModeIndex a, ModeIndex b, ModeIndex c, ModeIndex d,
                       const QuadratureRule& rule) {
  if (rule.gaussian_power != 2)
    throw std::invalid_argument("quartic_overlap: need a gaussian_power 2 rule");
  const int count = std::max({a.n, b.n, c.n, d.n}) + 1;
  double s = 0.0;
  const Eigen::MatrixXd va =
      eigenfunction_values(std::abs(a.m), count, rule.nodes);
  const Eigen::MatrixXd vb =
      eigenfunction_values(std::abs(b.m), count, rule.nodes);
  const Eigen::MatrixXd vc =
      eigenfunction_values(std::abs(c.m), count, rule.nodes);
  const Eigen::MatrixXd vd =
      eigenfunction_values(std::abs(d.m), count, rule.nodes);
  for (std::size_t k = 0; k < rule.nodes.size(); ++k)
    s += rule.weights[k] * va(a.n, k) * vb(b.n, k) * vc(c.n, k) * vd(d.n, k);
  return s;
}

double quartic_overlap(ModeIndex a, ModeIndex b, ModeIndex c, ModeIndex d) {
  const int deg = std::abs(a.m) + 2 * a.n + std::abs(b.m) + 2 * b.n +
                  std::abs(c.m) + 2 * c.n + std::abs(d.m) + 2 * d.n;
  return quartic_overlap(a, b, c, d, radial_rule(2, deg / 2 + 1));
}

double ode_residual(ModeIndex mode) {
  const int a = std::abs(mode.m);
  const double lambda = oscillator_eigenvalue(mode);
  const QuadratureRule rule = radial_rule(1, a + 2 * mode.n + 8);
  const double h = 1e-3;
  double ss = 0.0;
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
    const double r = rule.nodes[k];
    if (r < 4 * h) continue;  // FD stencil must stay on (0, inf)
    double v[5];
    for (int j = -2; j <= 2; ++j)
      v[j + 2] = eigenfunction_value(mode, r + j * h);
    const double d1 = (v[0] - 8 * v[1] + 8 * v[3] - v[4]) / (12 * h);
    const double d2 =
        (-v[0] + 16 * v[1] - 30 * v[2] + 16 * v[3] - v[4]) / (12 * h * h);
    const double res =
        -d2 - d1 / r + (double(a) * a / (r * r) + r * r - lambda) * v[2];
    ss += rule.weights[k] * res * res;
  }
  return std::sqrt(ss);
}

}  // namespace gpv
