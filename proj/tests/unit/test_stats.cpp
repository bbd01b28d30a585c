#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "gk/errors.hpp"
#include "gk/rng.hpp"
#include "gk/stats.hpp"

using namespace gk;

namespace {

std::vector<double> gaussians(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = std::sqrt(-2 * std::log(rng.uniform_open0())) * std::cos(2 * 3.141592653589793 * rng.uniform());
  return v;
}

std::vector<double> series_z() {
  std::vector<double> z;
  for (int i = 1; i <= 80; ++i) z.push_back(std::sin(1.7 * i) + 0.3 * std::cos(0.37 * i * i));
  return z;
}

}  // namespace

TEST_SUITE("stats") {

TEST_CASE("moments and correlation against reference values") {
  const auto z = series_z();
  std::vector<double> w;
  for (double v : z) w.push_back(std::exp(v));
  // reference values from an independent statistics package
  CHECK(variance(z) == doctest::Approx(0.54200990971107).epsilon(1e-12));
  CHECK(covariance(z, w) == doctest::Approx(0.6686184199326027).epsilon(1e-12));
  CHECK(pearson(z, w) == doctest::Approx(0.9496450998961493).epsilon(1e-12));
  CHECK(mean(std::vector<double>{1, 2, 3, 4}) == 2.5);
}

TEST_CASE("Kolmogorov-Smirnov") {
  std::vector<double> x, y;
  for (int i = 1; i <= 60; ++i) {
    x.push_back(((i * 37) % 101) / 101.0);
    y.push_back(x.back() * x.back());
  }
  auto uni = [](double t) { return std::clamp(t, 0.0, 1.0); };
  const auto a = ks_test(x, uni), b = ks_test(y, uni);
  CHECK(a.statistic == doctest::Approx(0.023102310231023104).epsilon(1e-14));
  CHECK(a.p_value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(b.statistic == doctest::Approx(0.25796817305492925).epsilon(1e-14));
  CHECK(b.p_value == doctest::Approx(0.0005148328173807072).epsilon(1e-9));
  CHECK_THROWS_AS(ks_test({}, uni), ParameterError);
}

TEST_CASE("D'Agostino omnibus test") {
  const auto z = series_z();
  std::vector<double> w;
  for (double v : z) w.push_back(std::exp(v));
  const auto a = dagostino_k2(z), b = dagostino_k2(w);
  CHECK(a.statistic == doctest::Approx(18.9766081286458).epsilon(1e-10));
  CHECK(a.p_value == doctest::Approx(7.573243176839204e-05).epsilon(1e-8));
  CHECK(b.statistic == doctest::Approx(10.13539354421042).epsilon(1e-10));
  CHECK(b.p_value == doctest::Approx(0.0062969066625926705).epsilon(1e-8));
  CHECK(dagostino_k2(gaussians(2000, 3)).p_value > 0.01);
  std::vector<double> ex;
  Rng rng(4);
  for (int i = 0; i < 2000; ++i) ex.push_back(rng.exponential(1.0));
  CHECK(dagostino_k2(ex).p_value < 1e-6);
  CHECK_THROWS_AS(dagostino_k2(std::vector<double>(10, 1.0)), ParameterError);
}

TEST_CASE("jackknife covariance") {
  const auto x = gaussians(300, 7), e = gaussians(300, 8);
  std::vector<double> y;
  for (std::size_t i = 0; i < x.size(); ++i) y.push_back(0.6 * x[i] + e[i]);
  const auto j = jackknife_covariance(x, y);
  CHECK(j.value == doctest::Approx(covariance(x, y)).epsilon(1e-14));
  // leave-one-out by hand
  const std::size_t n = x.size();
  std::vector<double> loo(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<double> a, b;
    for (std::size_t i = 0; i < n; ++i)
      if (i != k) a.push_back(x[i]), b.push_back(y[i]);
    loo[k] = covariance(a, b);
  }
  const double lm = mean(loo);
  double s = 0.0;
  for (double v : loo) s += (v - lm) * (v - lm);
  CHECK(j.se == doctest::Approx(std::sqrt((n - 1.0) / n * s)).epsilon(1e-10));
  // the standard error shrinks like 1/sqrt(M)
  double r = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto a = gaussians(2000, 100 + seed), b = gaussians(4000, 200 + seed);
    r += jackknife_covariance(a, a).se / jackknife_covariance(b, b).se;
  }
  CHECK(r / 20 == doctest::Approx(std::sqrt(2.0)).epsilon(0.05));
}

TEST_CASE("least squares") {
  const std::vector<double> x{0, 1, 2, 3, 4, 5};
  std::vector<double> y;
  for (double v : x) y.push_back(1.5 - 0.25 * v);
  const auto f = linear_fit(x, y);
  CHECK(f.slope == doctest::Approx(-0.25).epsilon(1e-14));
  CHECK(f.intercept == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(f.r2 == doctest::Approx(1.0).epsilon(1e-14));

  const auto noise = gaussians(6, 9);
  std::vector<double> yn, sig{0.1, 0.2, 0.1, 0.3, 0.2, 0.1};
  for (std::size_t i = 0; i < x.size(); ++i) yn.push_back(y[i] + 0.1 * noise[i]);
  Eigen::MatrixXd X(6, 2);
  Eigen::VectorXd Y(6);
  for (int i = 0; i < 6; ++i) X(i, 0) = 1.0, X(i, 1) = x[static_cast<std::size_t>(i)], Y(i) = yn[static_cast<std::size_t>(i)];
  const Eigen::VectorXd beta = X.colPivHouseholderQr().solve(Y);
  const Eigen::VectorXd res = Y - X * beta;
  const Eigen::MatrixXd cov = (X.transpose() * X).inverse() * (res.squaredNorm() / 4.0);
  const auto g = linear_fit(x, yn);
  CHECK(g.intercept == doctest::Approx(beta(0)).epsilon(1e-12));
  CHECK(g.slope == doctest::Approx(beta(1)).epsilon(1e-12));
  CHECK(g.intercept_se == doctest::Approx(std::sqrt(cov(0, 0))).epsilon(1e-10));
  CHECK(g.slope_se == doctest::Approx(std::sqrt(cov(1, 1))).epsilon(1e-10));
  const double tss = (Y.array() - Y.mean()).square().sum();
  CHECK(g.r2 == doctest::Approx(1 - res.squaredNorm() / tss).epsilon(1e-12));

  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(6, 6);
  for (int i = 0; i < 6; ++i) W(i, i) = 1.0 / (sig[static_cast<std::size_t>(i)] * sig[static_cast<std::size_t>(i)]);
  const Eigen::MatrixXd I = (X.transpose() * W * X).inverse();
  const Eigen::VectorXd bw = I * X.transpose() * W * Y;
  const auto h = weighted_linear_fit(x, yn, sig);
  CHECK(h.intercept == doctest::Approx(bw(0)).epsilon(1e-12));
  CHECK(h.slope == doctest::Approx(bw(1)).epsilon(1e-12));
  CHECK(h.intercept_se == doctest::Approx(std::sqrt(I(0, 0))).epsilon(1e-10));
  CHECK(h.slope_se == doctest::Approx(std::sqrt(I(1, 1))).epsilon(1e-10));
}

TEST_CASE("Fisher interval") {
  const auto iv = correlation_interval(0.5, 103, 1.96);
  CHECK(iv.lo == doctest::Approx(std::tanh(0.5493061443340549 - 0.196)).epsilon(1e-12));
  CHECK(iv.hi == doctest::Approx(std::tanh(0.5493061443340549 + 0.196)).epsilon(1e-12));
  const auto wide = correlation_interval(0.9, 3);
  CHECK(wide.lo == -1.0);
  CHECK(wide.hi == 1.0);
}

}  // TEST_SUITE
