#pragma once

// The adjoint of the generator applied to 1, cylinder-function expansions and
// the centered projection of h0, with brute-force counterparts.

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "gk/lattice.hpp"
#include "gk/profile.hpp"

namespace gk {

/// Coefficient tables of L*_N 1 = U + K Upsilon for a product reference measure.
struct AdjointTerms {
  Torus torus;
  double K = 0.0;
  double gamma = 0.0;
  std::vector<double> rho, chi, beta;
  std::vector<double> laplacian;  // Delta_N rho
  std::vector<double> G0, G2, G3;
  /// G1[j](x) = G_{1,j}(x); G1[0] includes G3.
  std::vector<std::vector<double>> G1;

  double U(const Configuration& c) const;
  double Upsilon(const Configuration& c) const;
};

AdjointTerms adjoint_terms(const Torus& t, const LatticeProfile& u, double gamma, double K);

/// U(eta) + K Upsilon(eta).
double adjoint_one(const Configuration& c, const AdjointTerms& terms);
double adjoint_one(const Configuration& c, const LatticeProfile& u, double gamma, double K);

/// (L*_N 1)(eta) for every state from the explicit sums over moves, with
/// exchange rate N^2 per bond and Glauber rate K c0. At most 5 sites.
std::vector<double> brute_force_adjoint(const Torus& t, const LatticeProfile& u, double gamma, double K);

/// (nu Q)(eta) / nu(eta) from the dense generator matrix; at most 12 sites.
std::vector<double> matrix_adjoint_one(const Torus& t, const LatticeProfile& u, double gamma, double K);

/// A cylinder function on a window of offsets along e_1, stored as the
/// coefficients c(B) of f = sum_B c(B) eta_B over subsets B (bit masks).
struct CylinderFunction {
  std::vector<int> window;
  std::vector<double> coeff;

  std::size_t size() const { return window.size(); }
  /// f at the window state with bit i equal to eta at window[i].
  double operator()(unsigned state) const;

  /// Mobius inversion of a value table indexed by window state.
  static CylinderFunction from_values(std::vector<int> window, const std::vector<double>& values);
  static CylinderFunction monomial(std::vector<int> window, unsigned mask);
};

/// h0 = (1 - 2 eta_0) c0 on the window {-1, 0, 1}.
CylinderFunction h0_function(double gamma);

/// Expansion of tau_x f in the centered variables: f = sum_C w(C) omega_{C+x}.
struct XiExpansion {
  std::vector<int> window;
  std::vector<double> rho;     // rho(x + window[i])
  std::vector<double> weight;  // w(C) by mask, all degrees

  /// Xi f: only the terms with |C| >= 2.
  double xi(unsigned state) const;
  /// Polynomial in omega evaluated with all degrees.
  double full(unsigned state) const;
  /// Smallest |C| among the nonzero terms of xi(); 0 when xi() vanishes.
  int min_degree() const;
};

XiExpansion xi_expansion(const CylinderFunction& f, const LatticeProfile& u, int x);

/// Xi f from its definition: tau_x f - E[tau_x f] - sum_y E[omega/chi tau_x f] omega_{x+y},
/// with the expectations computed by enumerating the window.
double xi_direct(const CylinderFunction& f, const LatticeProfile& u, int x, unsigned state);

/// E_nu[tau_x f] by enumeration.
double window_expectation(const CylinderFunction& f, const LatticeProfile& u, int x);

struct XiCentered {
  double xi_c = 0.0;
  double minus_vpp = 0.0;  // -V''(u(x))
};

XiCentered xi_centered_h0(const LatticeProfile& u, int x, double gamma);
/// max_x |Xi^c + V''(u(x))|.
double xi_centered_deviation(const LatticeProfile& u, double gamma);

/// Worst residual of tau_x f - E = -V'' omega_x + Xi f + Pi^1 f + R^1 omega_x
/// over the window states and all x, with Xi taken from the expansion.
double decomposition_residual(const CylinderFunction& f, const LatticeProfile& u, double gamma);

}  // namespace gk
