#pragma once

// Test functions on R x T^{d-1}, the scaling map, cell averages and the
// fluctuation field.

#include <cstddef>
#include <map>
#include <memory>
#include "json.hpp"
#include <string>
#include <utility>
#include <vector>

#include "gk/lattice.hpp"
#include "gk/potential.hpp"

namespace gk {

/// One-dimensional profile in the interface-normal coordinate.
struct NormalProfile {
  enum class Kind { Gaussian, Bump, GaussianDerivative, Interface };
  Kind kind = Kind::Gaussian;
  double center = 0.0;
  double width = 1.0;  // Gaussian sd, bump radius; half-period P/2 for Interface
  double amplitude = 1.0;
  double gamma = 0.75;  // Interface only
  double K = 0.0;       // Interface only

  double value(double t) const;
  double d1(double t) const;
  double d2(double t) const;
  /// Closed support interval outside of which value() is exactly 0.
  std::pair<double, double> support() const;
};

struct TransverseMode {
  enum class Kind { Constant, Cos, Sin };
  Kind kind = Kind::Constant;
  int k = 0;

  double value(double th) const;
  double d1(double th) const;
  /// int_T value^2.
  double norm_sq() const { return kind == Kind::Constant ? 1.0 : 0.5; }
  bool operator<(const TransverseMode& o) const {
    return kind != o.kind ? kind < o.kind : k < o.k;
  }
  bool operator==(const TransverseMode& o) const { return kind == o.kind && k == o.k; }
};

class TestFunction {
 public:
  struct Term {
    double coeff = 1.0;
    NormalProfile f;
    TransverseMode g;
  };

  TestFunction() = default;
  TestFunction(std::string name, std::vector<Term> terms);

  static TestFunction gaussian(double center, double sd, double amplitude = 1.0);
  static TestFunction bump(double center, double radius, double amplitude = 1.0);
  static TestFunction gaussian_derivative(double center, double sd, double amplitude = 1.0);
  static TestFunction interface(const PotentialParams& p, double K, double amplitude = 1.0);
  /// Multiply every term by a transverse Fourier mode (d = 2).
  TestFunction with_mode(TransverseMode m) const;

  const std::string& name() const { return name_; }
  void set_name(std::string n) { name_ = std::move(n); }
  const std::vector<Term>& terms() const { return terms_; }

  double operator()(double t, double th = 0.0) const;
  double d_normal(double t, double th = 0.0) const;
  double d_transverse(double t, double th = 0.0) const;
  std::pair<double, double> support() const;

  /// Exact squared L2 norm over R x T (quadrature in the normal coordinate).
  double l2_norm_sq() const;
  double d_normal_norm_sq() const;
  double d_transverse_norm_sq() const;

  /// <F>(theta) expanded in transverse modes: m -> int F_m(t) e(t) dt.
  std::map<TransverseMode, double> projection(const InterfaceShape& e) const;
  /// <F, e> for d = 1 (the constant-mode coefficient).
  double inner_e(const InterfaceShape& e) const;

  friend TestFunction operator+(const TestFunction& a, const TestFunction& b);
  friend TestFunction operator*(double s, const TestFunction& a);

  nlohmann::json to_json() const;
  static TestFunction from_json(const nlohmann::json& j);

 private:
  std::string name_;
  std::vector<Term> terms_;
};

/// Image of a site: (x1 sqrt(K)/N, x2/N) with x1 taken in [-N/2, N/2).
std::pair<double, double> map_A(const Torus& t, std::size_t site, double K);

/// Mean of F over the image cell of a site, by 5-point Gauss product quadrature.
double cell_average(const TestFunction& F, const Torus& t, std::size_t site, double K);

/// Precomputed weights F^(Ax) over the sites whose cells meet the support.
class FieldKernel {
 public:
  FieldKernel(const TestFunction& F, const LatticeProfile& u);

  double evaluate(const Configuration& c) const;
  /// Variance of the field under the product measure nu^N.
  double exact_variance() const;
  double scale() const { return scale_; }
  const std::vector<std::pair<std::uint32_t, double>>& weights() const { return w_; }
  const std::string& name() const { return name_; }

 private:
  std::string name_;
  std::vector<std::pair<std::uint32_t, double>> w_;
  double offset_ = 0.0;
  double variance_sum_ = 0.0;
  double scale_ = 0.0;
};

double fluctuation_field(const Configuration& c, const LatticeProfile& u, const TestFunction& F);

/// Cov(X(F), X(G)) under nu^N for two kernels built on the same profile.
double exact_covariance(const FieldKernel& a, const FieldKernel& b, const LatticeProfile& u);

/// Riemann-sum norms on the lattice: (sqrt(K)/N^d) sum F^2, and the
/// rescaled gradient sums along the normal and transverse axes.
struct RiemannSums {
  double value_sq = 0.0;
  double normal_gradient_sq = 0.0;
  double transverse_gradient_sq = 0.0;
};
RiemannSums riemann_sums(const TestFunction& F, int N, int d, double K);

struct DensityProfileReport {
  std::vector<double> mean;       // per x1 (index order 0..N-1)
  std::vector<double> deviation;  // mean - u^N
  std::vector<double> band;       // 3 standard errors under nu^N
  double max_deviation = 0.0;
  double fraction_within = 0.0;
  /// Crossing of rho* by the mean profile closest to the origin, in theta units.
  double interface_position = 0.0;
};

/// Empirical mean occupation per x1, averaged over replicas and transverse coordinates.
DensityProfileReport mean_density_profile(const std::vector<const Configuration*>& snapshots,
                                          const LatticeProfile& u);

}  // namespace gk
