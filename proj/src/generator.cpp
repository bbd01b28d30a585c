#include "gk/generator.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include "gk/errors.hpp"
#include "gk/potential.hpp"

namespace gk {

Eigen::MatrixXd dense_generator(const Torus& t, double bond_rate, double K, double gamma) {
  const std::size_t S = t.sites();
  if (S > 12) throw SizeError("dense_generator: at most 12 sites");
  const std::size_t n = std::size_t{1} << S;
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t s = 0; s < n; ++s) {
    const auto c = Configuration::from_state_index(t, s);
    const auto row = static_cast<Eigen::Index>(s);
    for (std::size_t x = 0; x < S; ++x) {
      for (int j = 0; j < t.d; ++j) {
        const std::size_t y = t.neighbor(x, j, +1);
        if (c.occupied(x) != c.occupied(y)) {
          const std::size_t to = s ^ (std::size_t{1} << x) ^ (std::size_t{1} << y);
          Q(row, static_cast<Eigen::Index>(to)) += bond_rate;
        }
      }
      const int sm = c.occupied(t.neighbor(x, 0, -1)) ? 1 : -1;
      const int s0 = c.occupied(x) ? 1 : -1;
      const int sp = c.occupied(t.neighbor(x, 0, +1)) ? 1 : -1;
      const double r = K * c0_rate(sm, s0, sp, gamma);
      if (r != 0.0) Q(row, static_cast<Eigen::Index>(s ^ (std::size_t{1} << x))) += r;
    }
    Q(row, row) = -Q.row(row).sum();
  }
  return Q;
}

Eigen::VectorXd transient_law(const Eigen::MatrixXd& Q, const Eigen::VectorXd& p0, double t) {
  const Eigen::MatrixXd P = (t * Q).exp();
  return P.transpose() * p0;
}

Eigen::VectorXd product_weights(const Torus& t, const LatticeProfile& u) {
  const std::size_t S = t.sites();
  if (S > 20) throw SizeError("product_weights: at most 20 sites");
  const std::size_t n = std::size_t{1} << S;
  Eigen::VectorXd w(static_cast<Eigen::Index>(n));
  for (std::size_t s = 0; s < n; ++s) {
    double p = 1.0;
    for (std::size_t x = 0; x < S; ++x) {
      const double r = u.at_site(x);
      p *= ((s >> x) & 1U) ? r : 1.0 - r;
    }
    w(static_cast<Eigen::Index>(s)) = p;
  }
  return w;
}

}  // namespace gk
