#pragma once

// Periodic Sturm-Liouville operator d^2 - V''(rho^K), its semigroup, the
// transverse heat semigroup and the limit covariances.

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "gk/fields.hpp"
#include "gk/potential.hpp"
#include "gk/profile.hpp"

namespace gk {

class SLOperator {
 public:
  double K = 0.0;
  double period = 0.0;
  double h = 0.0;
  std::vector<double> theta;
  std::vector<double> potential;  // V''(rho^K) at the nodes
  /// Eigenvalues in descending order; all of them after a full decomposition.
  std::vector<double> eigenvalues;
  /// Columns are eigenvectors normalized so that h sum psi^2 = 1.
  Eigen::MatrixXd eigenvectors;

  std::size_t size() const { return theta.size(); }
  bool full() const { return eigenvalues.size() == theta.size(); }
  std::vector<double> apply(const std::vector<double>& f) const;
  double inner(const std::vector<double>& a, const std::vector<double>& b) const;
  double norm(const std::vector<double>& a) const;
  std::vector<double> eigenvector(std::size_t k) const;
};

/// Central differences on the periodic grid of `grid_points` nodes. `top` = 0
/// requests the full decomposition (grid_points <= 4096); otherwise only the
/// `top` largest eigenpairs are computed by a banded solver.
SLOperator assemble_sl(const ProfileGrid& g, const PotentialParams& p, std::size_t grid_points,
                       std::size_t top = 0);
/// Same operator with a given potential sampled on the grid.
SLOperator assemble_sl_from_potential(std::vector<double> potential, double K, std::size_t top = 0);

/// sum_k exp(t K lambda_k) <F, psi_k> psi_k; requires a full decomposition.
std::vector<double> semigroup_apply(const SLOperator& sl, double t, const std::vector<double>& F, double K);

/// Fourier multiplier exp(-4 pi^2 k^2 t) on a uniform grid of T.
std::vector<double> heat_semigroup(const std::vector<double>& g, double t);

struct GroundStateReport {
  double lambda0 = 0.0;
  double lambda1 = 0.0;
  double gap = 0.0;
  /// |psi_0 - e_K| with psi_0 sign-aligned to e_K and e_K normalized on the grid.
  double distance_psi0 = 0.0;
  /// Distance from e_K to its normalized projection onto span{psi_0, psi_1}.
  double distance_localized = 0.0;
  /// |A psi| / |psi| for psi = d rho^K on the grid.
  double derivative_residual = 0.0;
};

GroundStateReport ground_state_report(const SLOperator& sl, const ProfileGrid& g);

double she_mode_covariance(int k, double s, double t, double varpi);

/// Limit covariance of (X_s(F), X_t(G)), s <= t, via the closed mode sum.
double limit_covariance(const TestFunction& F, const TestFunction& G, double s, double t,
                        const PotentialParams& p, int d);

/// The same covariance from the time-space double integral, evaluated by
/// quadrature in r, a theta grid with the heat semigroup, and separate
/// quadratures of the two theta-integrals of the noise.
double limit_covariance_quadrature(const TestFunction& F, const TestFunction& G, double s, double t,
                                   const PotentialParams& p, int d, std::size_t theta_points = 256);

}  // namespace gk
