#include "gk/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>

#include "gk/errors.hpp"

namespace gk {

double mean(const std::vector<double>& x) {
  if (x.empty()) throw ParameterError("mean: empty sample");
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double covariance(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ParameterError("covariance: need two equal samples of size >= 2");
  const double mx = mean(x), my = mean(y);
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - mx) * (y[i] - my);
  return s / static_cast<double>(x.size() - 1);
}

double variance(const std::vector<double>& x) { return covariance(x, x); }

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  return covariance(x, y) / std::sqrt(variance(x) * variance(y));
}

Estimate jackknife_covariance(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n != y.size() || n < 3) throw ParameterError("jackknife_covariance: need two equal samples of size >= 3");
  double sx = 0.0, sy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxy += x[i] * y[i];
  }
  const double m = static_cast<double>(n - 1);
  std::vector<double> loo(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double ax = sx - x[i], ay = sy - y[i], axy = sxy - x[i] * y[i];
    loo[i] = (axy - ax * ay / m) / (m - 1.0);
  }
  const double lm = mean(loo);
  double ss = 0.0;
  for (double v : loo) ss += (v - lm) * (v - lm);
  Estimate e;
  e.value = covariance(x, y);
  e.se = std::sqrt(ss * m / static_cast<double>(n));
  return e;
}

LinearFit weighted_linear_fit(const std::vector<double>& x, const std::vector<double>& y,
                              const std::vector<double>& sigma) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n || sigma.size() != n) throw ParameterError("weighted_linear_fit: bad sizes");
  double S = 0, Sx = 0, Sy = 0, Sxx = 0, Sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = 1.0 / (sigma[i] * sigma[i]);
    S += w;
    Sx += w * x[i];
    Sy += w * y[i];
    Sxx += w * x[i] * x[i];
    Sxy += w * x[i] * y[i];
  }
  const double D = S * Sxx - Sx * Sx;
  LinearFit f;
  f.slope = (S * Sxy - Sx * Sy) / D;
  f.intercept = (Sxx * Sy - Sx * Sxy) / D;
  f.slope_se = std::sqrt(S / D);
  f.intercept_se = std::sqrt(Sxx / D);
  const double ym = Sy / S;
  double ssr = 0, sst = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = 1.0 / (sigma[i] * sigma[i]);
    const double r = y[i] - f.intercept - f.slope * x[i];
    ssr += w * r * r;
    sst += w * (y[i] - ym) * (y[i] - ym);
  }
  f.r2 = sst > 0 ? 1.0 - ssr / sst : 1.0;
  return f;
}

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  LinearFit f = weighted_linear_fit(x, y, std::vector<double>(n, 1.0));
  if (n > 2) {
    double ssr = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = y[i] - f.intercept - f.slope * x[i];
      ssr += r * r;
    }
    const double s2 = ssr / static_cast<double>(n - 2);
    f.slope_se *= std::sqrt(s2);
    f.intercept_se *= std::sqrt(s2);
  }
  return f;
}

TestResult dagostino_k2(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  if (x.size() < 20) throw ParameterError("dagostino_k2: need at least 20 samples");
  const double m = mean(x);
  double m2 = 0, m3 = 0, m4 = 0;
  for (double v : x) {
    const double d = v - m;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  const double b1 = m3 / std::pow(m2, 1.5);
  const double b2 = m4 / (m2 * m2);

  // skewness
  const double y = b1 * std::sqrt((n + 1) * (n + 3) / (6.0 * (n - 2)));
  const double beta2 = 3.0 * (n * n + 27 * n - 70) * (n + 1) * (n + 3) / ((n - 2) * (n + 5) * (n + 7) * (n + 9));
  const double w2 = -1.0 + std::sqrt(2.0 * (beta2 - 1.0));
  const double delta = 1.0 / std::sqrt(std::log(std::sqrt(w2)));
  const double alpha = std::sqrt(2.0 / (w2 - 1.0));
  const double zs = delta * std::asinh(y / alpha);

  // kurtosis
  const double eb2 = 3.0 * (n - 1) / (n + 1);
  const double vb2 = 24.0 * n * (n - 2) * (n - 3) / ((n + 1) * (n + 1) * (n + 3) * (n + 5));
  const double xk = (b2 - eb2) / std::sqrt(vb2);
  const double sb1 = 6.0 * (n * n - 5 * n + 2) / ((n + 7) * (n + 9)) *
                     std::sqrt(6.0 * (n + 3) * (n + 5) / (n * (n - 2) * (n - 3)));
  const double A = 6.0 + 8.0 / sb1 * (2.0 / sb1 + std::sqrt(1.0 + 4.0 / (sb1 * sb1)));
  const double t = (1.0 - 2.0 / A) / (1.0 + xk * std::sqrt(2.0 / (A - 4.0)));
  const double zk = ((1.0 - 2.0 / (9.0 * A)) - std::cbrt(t)) / std::sqrt(2.0 / (9.0 * A));

  TestResult r;
  r.statistic = zs * zs + zk * zk;
  r.p_value = boost::math::cdf(boost::math::complement(boost::math::chi_squared(2.0), r.statistic));
  return r;
}

TestResult ks_test(std::vector<double> x, const std::function<double(double)>& cdf) {
  if (x.empty()) throw ParameterError("ks_test: empty sample");
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double D = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double F = cdf(x[i]);
    D = std::max({D, (static_cast<double>(i) + 1.0) / n - F, F - static_cast<double>(i) / n});
  }
  // Kolmogorov distribution with the Stephens small-sample correction
  const double lam = (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n)) * D;
  double p = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = 2.0 * ((j % 2) ? 1.0 : -1.0) * std::exp(-2.0 * j * j * lam * lam);
    p += term;
    if (std::abs(term) < 1e-16) break;
  }
  TestResult r;
  r.statistic = D;
  r.p_value = std::clamp(p, 0.0, 1.0);
  if (lam < 0.2) r.p_value = 1.0;
  return r;
}

Interval correlation_interval(double r, std::size_t n, double z) {
  if (n < 4) return {-1.0, 1.0};
  const double f = std::atanh(std::clamp(r, -0.999999999, 0.999999999));
  const double s = 1.0 / std::sqrt(static_cast<double>(n) - 3.0);
  return {std::tanh(f - z * s), std::tanh(f + z * s)};
}

}  // namespace gk
