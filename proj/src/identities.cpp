#include "gk/identities.hpp"

#include <bit>
#include <cmath>

#include "gk/errors.hpp"
#include "gk/generator.hpp"
#include "gk/potential.hpp"

namespace gk {

namespace {

int spin(const Configuration& c, std::size_t x) { return c.occupied(x) ? 1 : -1; }

double glauber_rate(const Configuration& c, const Torus& t, std::size_t x, double gamma) {
  return c0_rate(spin(c, t.neighbor(x, 0, -1)), spin(c, x), spin(c, t.neighbor(x, 0, +1)), gamma);
}

// nu(eta with bit x replaced by b) / nu(eta) for one coordinate.
double site_ratio(double r, int from, int to) {
  if (from == to) return 1.0;
  return to == 1 ? r / (1.0 - r) : (1.0 - r) / r;
}

}  // namespace

AdjointTerms adjoint_terms(const Torus& t, const LatticeProfile& u, double gamma, double K) {
  if (u.N() != t.N) throw ParameterError("adjoint_terms: profile and torus sizes differ");
  AdjointTerms a;
  a.torus = t;
  a.K = K;
  a.gamma = gamma;
  const std::size_t S = t.sites();
  a.rho.resize(S);
  a.chi.resize(S);
  a.beta.resize(S);
  for (std::size_t x = 0; x < S; ++x) {
    a.rho[x] = u.at_site(x);
    if (!(a.rho[x] > 0.0 && a.rho[x] < 1.0)) throw DomainError("adjoint_terms: profile values must lie in (0,1)");
    a.chi[x] = chi(a.rho[x]);
    a.beta[x] = 2.0 * a.rho[x] - 1.0;
  }
  const double N2 = static_cast<double>(t.N) * t.N;
  a.laplacian.assign(S, 0.0);
  a.G0.resize(S);
  a.G2.resize(S);
  a.G3.resize(S);
  a.G1.assign(static_cast<std::size_t>(t.d), std::vector<double>(S, 0.0));
  const double g2 = gamma * gamma;
  for (std::size_t x = 0; x < S; ++x) {
    for (int j = 0; j < t.d; ++j) {
      a.laplacian[x] += N2 * (a.rho[t.neighbor(x, j, +1)] + a.rho[t.neighbor(x, j, -1)] - 2.0 * a.rho[x]);
    }
    const std::size_t xm = t.neighbor(x, 0, -1), xp = t.neighbor(x, 0, +1), xpp = t.neighbor(xp, 0, +1);
    a.G0[x] = gamma * (a.beta[xm] + a.beta[xp]) - a.beta[x] - g2 * a.beta[xm] * a.beta[x] * a.beta[xp];
    a.G2[x] = -4.0 * g2 * a.beta[x] / a.chi[x];
    a.G3[x] = 2.0 * gamma * (1.0 / a.chi[x] + 1.0 / a.chi[xp]) -
              2.0 * g2 * (a.beta[xm] * a.beta[x] / a.chi[x] + a.beta[xp] * a.beta[xpp] / a.chi[xp]);
    for (int j = 0; j < t.d; ++j) {
      const std::size_t y = t.neighbor(x, j, +1);
      const double dr = a.rho[y] - a.rho[x];
      double g = -(K > 0.0 ? N2 / K : 0.0) * dr * dr / (a.chi[x] * a.chi[y]);
      if (j == 0) g += a.G3[x];
      a.G1[static_cast<std::size_t>(j)][x] = g;
    }
  }
  return a;
}

double AdjointTerms::U(const Configuration& c) const {
  double s = 0.0;
  for (std::size_t x = 0; x < torus.sites(); ++x) {
    s += (laplacian[x] + K * G0[x]) * (c.eta(x) - rho[x]) / chi[x];
  }
  return s;
}

double AdjointTerms::Upsilon(const Configuration& c) const {
  double s = 0.0;
  for (std::size_t x = 0; x < torus.sites(); ++x) {
    const double wx = c.eta(x) - rho[x];
    for (int j = 0; j < torus.d; ++j) {
      const std::size_t y = torus.neighbor(x, j, +1);
      s += G1[static_cast<std::size_t>(j)][x] * wx * (c.eta(y) - rho[y]);
    }
    const std::size_t xm = torus.neighbor(x, 0, -1), xp = torus.neighbor(x, 0, +1);
    s += G2[x] * (c.eta(xm) - rho[xm]) * wx * (c.eta(xp) - rho[xp]);
  }
  return s;
}

double adjoint_one(const Configuration& c, const AdjointTerms& terms) {
  return terms.U(c) + terms.K * terms.Upsilon(c);
}

double adjoint_one(const Configuration& c, const LatticeProfile& u, double gamma, double K) {
  return adjoint_one(c, adjoint_terms(c.torus(), u, gamma, K));
}

std::vector<double> brute_force_adjoint(const Torus& t, const LatticeProfile& u, double gamma, double K) {
  const std::size_t S = t.sites();
  if (S > 5) throw SizeError("brute_force_adjoint: at most 5 sites");
  const double N2 = static_cast<double>(t.N) * t.N;
  const std::size_t n = std::size_t{1} << S;
  std::vector<double> out(n, 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    const auto c = Configuration::from_state_index(t, s);
    double ex = 0.0;
    for (std::size_t x = 0; x < S; ++x) {
      for (int j = 0; j < t.d; ++j) {
        const std::size_t y = t.neighbor(x, j, +1);
        const int ex_ = c.eta(x), ey = c.eta(y);
        const double ratio = site_ratio(u.at_site(x), ex_, ey) * site_ratio(u.at_site(y), ey, ex_);
        ex += ratio - 1.0;
      }
    }
    double gl = 0.0;
    for (std::size_t x = 0; x < S; ++x) {
      auto f = c;
      f.flip(x);
      const double ratio = site_ratio(u.at_site(x), c.eta(x), f.eta(x));
      gl += ratio * glauber_rate(f, t, x, gamma) - glauber_rate(c, t, x, gamma);
    }
    out[s] = N2 * ex + K * gl;
  }
  return out;
}

std::vector<double> matrix_adjoint_one(const Torus& t, const LatticeProfile& u, double gamma, double K) {
  const double N2 = static_cast<double>(t.N) * t.N;
  const Eigen::MatrixXd Q = dense_generator(t, N2, K, gamma);
  const Eigen::VectorXd nu = product_weights(t, u);
  const Eigen::VectorXd flux = Q.transpose() * nu;
  std::vector<double> out(static_cast<std::size_t>(nu.size()));
  for (Eigen::Index i = 0; i < nu.size(); ++i) out[static_cast<std::size_t>(i)] = flux(i) / nu(i);
  return out;
}

double CylinderFunction::operator()(unsigned state) const {
  double s = 0.0;
  for (unsigned B = 0; B < coeff.size(); ++B) {
    if ((state & B) == B) s += coeff[B];
  }
  return s;
}

CylinderFunction CylinderFunction::from_values(std::vector<int> window, const std::vector<double>& values) {
  if (window.size() > 4) throw SizeError("CylinderFunction: window of at most 4 sites");
  const std::size_t n = std::size_t{1} << window.size();
  if (values.size() != n) throw ParameterError("CylinderFunction: value table size mismatch");
  CylinderFunction f;
  f.window = std::move(window);
  f.coeff.assign(n, 0.0);
  for (unsigned B = 0; B < n; ++B) {
    // c(B) = sum over C subset of B of (-1)^{|B \ C|} f(1_C)
    for (unsigned C = B;; C = (C - 1) & B) {
      const int sign = (std::popcount(B ^ C) % 2 == 0) ? 1 : -1;
      f.coeff[B] += sign * values[C];
      if (C == 0) break;
    }
  }
  return f;
}

CylinderFunction CylinderFunction::monomial(std::vector<int> window, unsigned mask) {
  if (window.size() > 4) throw SizeError("CylinderFunction: window of at most 4 sites");
  CylinderFunction f;
  f.coeff.assign(std::size_t{1} << window.size(), 0.0);
  f.coeff.at(mask) = 1.0;
  f.window = std::move(window);
  return f;
}

CylinderFunction h0_function(double gamma) {
  std::vector<double> v(8);
  for (unsigned s = 0; s < 8; ++s) {
    const int sm = (s & 1U) ? 1 : -1, s0 = (s & 2U) ? 1 : -1, sp = (s & 4U) ? 1 : -1;
    const double eta0 = (s & 2U) ? 1.0 : 0.0;
    v[s] = (1.0 - 2.0 * eta0) * c0_rate(sm, s0, sp, gamma);
  }
  return CylinderFunction::from_values({-1, 0, 1}, v);
}

XiExpansion xi_expansion(const CylinderFunction& f, const LatticeProfile& u, int x) {
  XiExpansion e;
  e.window = f.window;
  const std::size_t n = f.size();
  e.rho.resize(n);
  for (std::size_t i = 0; i < n; ++i) e.rho[i] = u.at(x + f.window[i]);
  e.weight.assign(f.coeff.size(), 0.0);
  const unsigned all = static_cast<unsigned>(f.coeff.size()) - 1;
  for (unsigned C = 0; C <= all; ++C) {
    // sum over B containing C of c(B) rho_{B \ C}
    const unsigned rest = all & ~C;
    for (unsigned D = rest;; D = (D - 1) & rest) {
      double r = f.coeff[C | D];
      for (std::size_t i = 0; i < n; ++i) {
        if (D & (1U << i)) r *= e.rho[i];
      }
      e.weight[C] += r;
      if (D == 0) break;
    }
  }
  return e;
}

namespace {

double omega_product(const XiExpansion& e, unsigned C, unsigned state) {
  double p = 1.0;
  for (std::size_t i = 0; i < e.window.size(); ++i) {
    if (C & (1U << i)) p *= ((state >> i) & 1U) - e.rho[i];
  }
  return p;
}

}  // namespace

double XiExpansion::xi(unsigned state) const {
  double s = 0.0;
  for (unsigned C = 0; C < weight.size(); ++C) {
    if (std::popcount(C) >= 2) s += weight[C] * omega_product(*this, C, state);
  }
  return s;
}

double XiExpansion::full(unsigned state) const {
  double s = 0.0;
  for (unsigned C = 0; C < weight.size(); ++C) s += weight[C] * omega_product(*this, C, state);
  return s;
}

int XiExpansion::min_degree() const {
  int best = 0;
  for (unsigned C = 0; C < weight.size(); ++C) {
    const int k = std::popcount(C);
    if (k >= 2 && weight[C] != 0.0 && (best == 0 || k < best)) best = k;
  }
  return best;
}

namespace {

double state_weight(const std::vector<double>& rho, unsigned s) {
  double p = 1.0;
  for (std::size_t i = 0; i < rho.size(); ++i) p *= ((s >> i) & 1U) ? rho[i] : 1.0 - rho[i];
  return p;
}

std::vector<double> window_rho(const CylinderFunction& f, const LatticeProfile& u, int x) {
  std::vector<double> r(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) r[i] = u.at(x + f.window[i]);
  return r;
}

// E[omega_{x+y} / chi(x+y) tau_x f] for each window position.
std::vector<double> linear_coefficients(const CylinderFunction& f, const std::vector<double>& rho) {
  const unsigned n = 1U << f.size();
  std::vector<double> a(f.size(), 0.0);
  for (unsigned s = 0; s < n; ++s) {
    const double w = state_weight(rho, s) * f(s);
    for (std::size_t i = 0; i < f.size(); ++i) {
      a[i] += w * (((s >> i) & 1U) - rho[i]) / chi(rho[i]);
    }
  }
  return a;
}

}  // namespace

double window_expectation(const CylinderFunction& f, const LatticeProfile& u, int x) {
  const auto rho = window_rho(f, u, x);
  double m = 0.0;
  for (unsigned s = 0; s < (1U << f.size()); ++s) m += state_weight(rho, s) * f(s);
  return m;
}

double xi_direct(const CylinderFunction& f, const LatticeProfile& u, int x, unsigned state) {
  const auto rho = window_rho(f, u, x);
  const auto a = linear_coefficients(f, rho);
  double r = f(state) - window_expectation(f, u, x);
  for (std::size_t i = 0; i < f.size(); ++i) r -= a[i] * (((state >> i) & 1U) - rho[i]);
  return r;
}

XiCentered xi_centered_h0(const LatticeProfile& u, int x, double gamma) {
  const auto h0 = h0_function(gamma);
  const auto rho = window_rho(h0, u, x);
  const auto a = linear_coefficients(h0, rho);
  XiCentered r;
  for (double v : a) r.xi_c += v;
  r.minus_vpp = -v_double_prime(u.at(x), gamma);
  return r;
}

double xi_centered_deviation(const LatticeProfile& u, double gamma) {
  double worst = 0.0;
  for (int x = 0; x < u.N(); ++x) {
    const auto r = xi_centered_h0(u, x, gamma);
    worst = std::max(worst, std::abs(r.xi_c - r.minus_vpp));
  }
  return worst;
}

double decomposition_residual(const CylinderFunction& f, const LatticeProfile& u, double gamma) {
  // the x-site of the decomposition is the window offset 0
  std::size_t center = f.size();
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f.window[i] == 0) center = i;
  }
  if (center == f.size()) throw ParameterError("decomposition_residual: window must contain the offset 0");
  double worst = 0.0;
  for (int x = 0; x < u.N(); ++x) {
    const auto rho = window_rho(f, u, x);
    const auto a = linear_coefficients(f, rho);
    const auto xi = xi_expansion(f, u, x);
    const double mean = window_expectation(f, u, x);
    const double vpp = v_double_prime(u.at(x), gamma);
    double asum = 0.0;
    for (double v : a) asum += v;
    for (unsigned s = 0; s < (1U << f.size()); ++s) {
      auto w = [&](std::size_t i) { return ((s >> i) & 1U) - rho[i]; };
      double pi1 = 0.0;
      for (std::size_t i = 0; i < f.size(); ++i) pi1 += a[i] * (w(i) - w(center));
      const double r1 = asum + vpp;
      const double rhs = -vpp * w(center) + xi.xi(s) + pi1 + r1 * w(center);
      worst = std::max(worst, std::abs(f(s) - mean - rhs));
    }
  }
  return worst;
}

}  // namespace gk
