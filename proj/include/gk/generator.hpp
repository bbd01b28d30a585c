#pragma once

// Dense generator matrix of the full dynamics on a tiny torus.

#include <Eigen/Dense>

#include "gk/lattice.hpp"

namespace gk {

/// Q(eta, xi) for all 2^sites states indexed by Configuration::state_index; sites <= 12.
Eigen::MatrixXd dense_generator(const Torus& t, double bond_rate, double K, double gamma);

/// Row vector p0 exp(tQ).
Eigen::VectorXd transient_law(const Eigen::MatrixXd& Q, const Eigen::VectorXd& p0, double t);

/// Product measure weights nu(eta) over all states.
Eigen::VectorXd product_weights(const Torus& t, const LatticeProfile& u);

}  // namespace gk
