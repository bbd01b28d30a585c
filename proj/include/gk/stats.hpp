#pragma once

// Estimators and tests used by the harness: jackknife covariances, linear
// fits, D'Agostino's omnibus normality test and the Kolmogorov-Smirnov test.

#include <functional>
#include <vector>

namespace gk {

double mean(const std::vector<double>& x);
/// Unbiased sample covariance.
double covariance(const std::vector<double>& x, const std::vector<double>& y);
double variance(const std::vector<double>& x);
double pearson(const std::vector<double>& x, const std::vector<double>& y);

struct Estimate {
  double value = 0.0;
  double se = 0.0;
};

/// Sample covariance with its leave-one-out jackknife standard error.
Estimate jackknife_covariance(const std::vector<double>& x, const std::vector<double>& y);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
  double intercept_se = 0.0;
  double r2 = 0.0;
};

/// Ordinary least squares y = intercept + slope x.
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);
/// Weighted least squares with weights 1/sigma^2; the standard errors come from the sigmas.
LinearFit weighted_linear_fit(const std::vector<double>& x, const std::vector<double>& y,
                              const std::vector<double>& sigma);

struct TestResult {
  double statistic = 0.0;
  double p_value = 0.0;
};

/// D'Agostino-Pearson K^2 from the skewness and kurtosis z-scores; needs n >= 20.
TestResult dagostino_k2(const std::vector<double>& x);

/// One-sample Kolmogorov-Smirnov test with the asymptotic Kolmogorov distribution.
TestResult ks_test(std::vector<double> x, const std::function<double(double)>& cdf);

/// Fisher z confidence interval for a correlation coefficient.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};
Interval correlation_interval(double r, std::size_t n, double z = 1.96);

}  // namespace gk
