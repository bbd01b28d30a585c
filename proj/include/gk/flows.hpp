#pragma once

// Block averages m_l, m_l^(2), flows from the Dirac mass to m_l^(2), and the
// two-block decomposition of W = sum_x G(x) omega_{x+A}.

#include <array>
#include <cstddef>
#include <vector>

#include "gk/lattice.hpp"
#include "gk/profile.hpp"

namespace gk {

using Point = std::array<int, 3>;

/// Values on the box {0, ..., side-1}^d, coordinate 1 fastest.
template <class T>
struct BoxFunction {
  int side = 0;
  int d = 1;
  std::vector<T> values;

  std::size_t index(const Point& p) const {
    std::size_t i = 0, s = 1;
    for (int j = 0; j < d; ++j) {
      i += static_cast<std::size_t>(p[static_cast<std::size_t>(j)]) * s;
      s *= static_cast<std::size_t>(side);
    }
    return i;
  }
  bool contains(const Point& p) const {
    for (int j = 0; j < d; ++j) {
      if (p[static_cast<std::size_t>(j)] < 0 || p[static_cast<std::size_t>(j)] >= side) return false;
    }
    return true;
  }
  Point point(std::size_t i) const {
    Point p{0, 0, 0};
    for (int j = 0; j < d; ++j) {
      p[static_cast<std::size_t>(j)] = static_cast<int>(i % static_cast<std::size_t>(side));
      i /= static_cast<std::size_t>(side);
    }
    return p;
  }
};

/// (m_l * m_l) on Lambda_{2(l-1)} = {0, ..., 2l-2}^d.
BoxFunction<double> m2_ell(int ell, int d);

/// A nearest-neighbor antisymmetric flow stored by bond (y, y + e_k) with y in the box.
struct Flow {
  int ell = 1;
  int d = 1;
  int side = 1;  // 2 ell - 1
  /// phi[k].values[y] = Phi(y, y + e_k); zero when y + e_k leaves the box.
  std::vector<BoxFunction<double>> phi;
  double energy = 0.0;
  /// True when the divergence was verified in exact rational arithmetic.
  bool exact = false;
  /// Largest floating-point divergence error; 0 for exact verification.
  double divergence_error = 0.0;

  double operator()(const Point& y, int k) const;
  /// sum_y Phi(x, y) over nearest neighbors.
  double divergence(const Point& x) const;
};

/// Flow from delta_0 to m_l^(2). The measure is reached through the chain
/// m^(2) at scales 1, 2, 4, ..., l and each link is a sequence of
/// one-coordinate sweeps. With `verify_exact` the construction is repeated in
/// rational arithmetic and the divergence checked exactly; a mismatch throws.
Flow build_flow(int ell, int d, bool verify_exact = true);

struct EllSequences {
  double ell = 0.0;
  double g = 0.0;
  double s = 0.0;
  double R = 0.0;
};

double g_d(double ell, int d);
EllSequences ell_sequences(int N, int d);

/// Average of omega over x + Lambda_{2(l-1)} with the weights m_l^(2); requires 4 l < N.
double omega_ell(const Configuration& c, const LatticeProfile& u, std::size_t x, int ell);

/// Variance of omega_ell under the product measure.
double omega_ell_variance(const LatticeProfile& u, const Torus& t, std::size_t x, int ell);

/// The lexicographic maximum among the maximal points of A.
Point maximal_point(const std::vector<Point>& A, int d);

struct WDecomposition {
  double W = 0.0;
  double W1 = 0.0;
  double W2 = 0.0;
  /// W2 from the summation by parts against H^(l)_{k,x}.
  double W2_flow = 0.0;
};

/// H^(l)_{k,x} = sum over bonds (y, y+e_k) in the box of Phi(y, y+e_k) G(x - x_A - y) omega_{x - x_A - y + A*}.
double H_ell(const Flow& flow, const std::vector<double>& G, const std::vector<Point>& A, const Configuration& c,
             const LatticeProfile& u, int k, std::size_t x);

WDecomposition w_decomposition(const std::vector<double>& G, const std::vector<Point>& A, const Configuration& c,
                               const LatticeProfile& u, const Flow& flow);

}  // namespace gk
