#pragma once

// Periodic two-layer stationary profile rho^K on the circle of length sqrt(K)
// and its lattice samples u^N.

#include <array>
#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "gk/potential.hpp"

namespace gk {

/// Smallest K for which a two-layer orbit of period sqrt(K) exists: the
/// small-oscillation period around rho* is 2 pi / sqrt(-V''(rho*)).
double minimal_two_layer_K(const PotentialParams& p);

/// Period of the closed orbit with turning points 1/2 +- M/2, M in (0, sqrt(2a)/gamma).
double orbit_period(const PotentialParams& p, double M);

class ProfileGrid {
 public:
  PotentialParams pot;
  double K = 0.0;
  double period = 0.0;      // sqrt(K)
  double energy = 0.0;      // first integral (1/2) rho'^2 - V(rho)
  double turning = 0.0;     // M: extremes of rho^K are 1/2 -+ M/2
  double elliptic_k = 0.0;  // modulus of the sn representation
  double h2 = 0.0;          // second crossing of rho*, in units of the period
  double m1 = 0.0;          // argmin of rho^K, in units of the period
  double m2 = 0.0;          // argmax of rho^K, in units of the period
  double closure_error = 0.0;

  std::vector<double> theta;  // uniform nodes on [-P/2, P/2)
  std::vector<double> rho;
  std::vector<double> drho;

  std::size_t size() const { return theta.size(); }
  double spacing() const { return period / static_cast<double>(theta.size()); }

  /// Cubic spline interpolant, periodic in theta.
  double operator()(double th) const;
  double derivative(double th) const;

  double min_value() const;
  double max_value() const;

  /// Interior finite-difference residual max |rho'' - V'(rho)| on the grid.
  double fd_residual() const;
  /// Max relative drift of the first integral over the grid.
  double energy_drift() const;
  /// max |d^j rho^K| for j = 1..4, using rho'' = V'(rho) for the higher orders.
  std::array<double, 4> derivative_bounds() const;

  std::string metadata_json() const;
  void write_csv(const std::string& path) const;

  struct Spline;
  std::shared_ptr<const Spline> spline;
};

/// Solves rho'' = V'(rho) on the circle of length sqrt(K), with rho(0) = 1/2,
/// rho'(0) < 0. Throws ParameterError for K < 4 or grid_points < 512, and
/// NoSolutionError when K is below minimal_two_layer_K.
ProfileGrid solve_rho_K(const PotentialParams& p, double K, std::size_t grid_points);

/// Standing wave glued along the two layers: the comparison profile for rho^K.
double glued_profile(const ProfileGrid& g, const StandingWave& w, double th);

/// sup |rho^K - glued| over the grid nodes.
double glued_distance(const ProfileGrid& g);

class LatticeProfile {
 public:
  LatticeProfile() = default;
  LatticeProfile(int N, int d, double K, std::vector<double> values);

  /// Constant profile, used for reversibility checks and K = 0 runs.
  static LatticeProfile constant(int N, int d, double rho);

  int N() const { return N_; }
  int d() const { return d_; }
  double K() const { return K_; }
  /// u^N along the first axis.
  const std::vector<double>& line() const { return u_; }
  /// Value at a site index (coordinate 1 fastest).
  double at_site(std::size_t site) const { return u_[site % static_cast<std::size_t>(N_)]; }
  double at(int x1) const;

 private:
  int N_ = 0;
  int d_ = 1;
  double K_ = 0.0;
  std::vector<double> u_;
};

LatticeProfile discrete_profile(const ProfileGrid& g, int N, int d);

/// The product-measure expectation of tau_x h0 with h0 = (1 - 2 eta_0) c0.
double g0_polynomial(double rm, double r0, double rp, double gamma);

/// max_x |Delta_N u + K E[tau_x h0]| with the G0 polynomial.
double stationarity_residual(const ProfileGrid& g, int N);
double stationarity_residual(const LatticeProfile& u, double gamma);

}  // namespace gk
