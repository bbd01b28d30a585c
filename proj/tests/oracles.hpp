#pragma once

// Independent numerical oracles shared by the unit and acceptance tests.
// None of them calls the closed forms they are compared against.

#include <array>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

using State = std::array<double, 2>;

inline double vprime(double r, double g) {
  const double m = 2 * r - 1;
  return -(2 * g - 1) * m + g * g * m * m * m;
}

/// Integrates rho'' = V'(rho) from (r0, s0) over [0, T] with an adaptive
/// Dormand-Prince stepper, sampling at the given increasing times.
inline std::vector<State> integrate(double g, State x, const std::vector<double>& times, double tol = 1e-13) {
  namespace ode = boost::numeric::odeint;
  auto rhs = [g](const State& y, State& dy, double) {
    dy[0] = y[1];
    dy[1] = vprime(y[0], g);
  };
  std::vector<State> out;
  if (times.empty()) return out;
  std::vector<double> grid;
  if (times.front() > 0.0) grid.push_back(0.0);
  grid.insert(grid.end(), times.begin(), times.end());
  const bool skip_first = times.front() > 0.0;
  ode::integrate_times(ode::make_dense_output(tol, tol, ode::runge_kutta_dopri5<State>()), rhs, x, grid.begin(),
                       grid.end(), 1e-3, [&](const State& y, double) { out.push_back(y); });
  if (skip_first) out.erase(out.begin());
  return out;
}

/// Standing wave by shooting: phi(0) = 1/2 and the slope is bisected until the
/// orbit neither overshoots rho_- nor turns back before `L`.
inline double shoot_slope(double g, double L) {
  double lo = -2.0, hi = 0.0;  // too steep / too shallow
  for (int it = 0; it < 200; ++it) {
    const double s = 0.5 * (lo + hi);
    namespace ode = boost::numeric::odeint;
    State x{0.5, s};
    bool overshoot = false, turned = false;
    auto rhs = [g](const State& y, State& dy, double) {
      dy[0] = y[1];
      dy[1] = vprime(y[0], g);
    };
    auto stepper = ode::make_controlled(1e-14, 1e-14, ode::runge_kutta_dopri5<State>());
    double t = 0.0, dt = 1e-3;
    while (t < L) {
      if (stepper.try_step(rhs, x, t, dt) == ode::fail) continue;
      if (x[1] > 0) {
        turned = true;
        break;
      }
      if (x[0] < 0.5 - 0.5 * std::sqrt(2 * g - 1) / g) {
        overshoot = true;
        break;
      }
      dt = std::min(dt, 0.01);
    }
    if (overshoot) {
      lo = s;
    } else if (turned) {
      hi = s;
    } else {
      return s;
    }
    if (hi - lo < 1e-16) break;
  }
  return 0.5 * (lo + hi);
}

/// phi sampled at the times (>= 0); the negative half follows from phi(-t) = 1 - phi(t).
inline std::vector<double> shoot_standing_wave(double g, const std::vector<double>& times, double L) {
  const double s = shoot_slope(g, L + 20.0);
  const auto st = integrate(g, {0.5, s}, times);
  std::vector<double> out;
  for (const auto& x : st) out.push_back(x[0]);
  return out;
}

/// Time for the orbit started at (1/2, s) with s < 0 to come back to 1/2.
inline double half_period(double g, double s) {
  namespace ode = boost::numeric::odeint;
  auto rhs = [g](const State& y, State& dy, double) {
    dy[0] = y[1];
    dy[1] = vprime(y[0], g);
  };
  auto stepper = ode::make_controlled(1e-13, 1e-13, ode::runge_kutta_dopri5<State>());
  State x{0.5, s};
  double t = 0.0, dt = 1e-3;
  bool passed_min = false;
  while (true) {
    State prev = x;
    double tp = t;
    if (stepper.try_step(rhs, x, t, dt) == ode::fail) continue;
    if (x[1] > 0) passed_min = true;
    if (passed_min && x[0] > 0.5) {
      // bisection on the last step
      double a = 0.0, b = t - tp;
      for (int k = 0; k < 60; ++k) {
        const double m = 0.5 * (a + b);
        State y = prev;
        ode::integrate_adaptive(ode::make_controlled(1e-14, 1e-14, ode::runge_kutta_dopri5<State>()), rhs, y, 0.0, m,
                                m / 4);
        if (y[0] > 0.5) {
          b = m;
        } else {
          a = m;
        }
      }
      return tp + 0.5 * (a + b);
    }
    dt = std::min(dt, 0.05);
    if (t > 1e4) return INFINITY;
  }
}

/// Shooting solve of the two-layer profile: the initial slope at rho = 1/2 is
/// bisected until the half period equals sqrt(K)/2. Returns the slope.
inline double shoot_profile_slope(double g, double K) {
  const double target = 0.5 * std::sqrt(K);
  // the half period grows without bound as the slope approaches the heteroclinic one
  double lo = -1e-6;
  double hi = shoot_slope(g, 30.0) * (1.0 - 1e-12);
  for (int it = 0; it < 80; ++it) {
    const double m = 0.5 * (lo + hi);
    if (half_period(g, m) < target) {
      lo = m;
    } else {
      hi = m;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace oracle
