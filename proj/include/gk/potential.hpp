#pragma once

// Double-well potential of the cubic Glauber family, its standing wave and
// the interface shape e = phi' / |phi'|.

#include <array>

namespace gk {

struct PotentialParams {
  double gamma = 0.75;
  double rho_minus = 0.0;
  double rho_star = 0.5;
  double rho_plus = 1.0;

  /// Requires 1/2 < gamma <= 1; throws ParameterError otherwise.
  static PotentialParams from_gamma(double gamma);
};

/// a = 2 gamma - 1, the linear coefficient of V'.
inline double well_coefficient(double gamma) { return 2.0 * gamma - 1.0; }

// The rate-level functions accept any |gamma| <= 1 so that degenerate
// parameter values (gamma = 0) can be used in identity checks.
double v_prime(double rho, double gamma);
double v(double rho, double gamma);
double v_double_prime(double rho, double gamma);
double v_triple_prime(double rho, double gamma);
double c0_mean(double rho, double gamma);

inline double v_prime(double rho, const PotentialParams& p) { return v_prime(rho, p.gamma); }
inline double v(double rho, const PotentialParams& p) { return v(rho, p.gamma); }
inline double v_double_prime(double rho, const PotentialParams& p) { return v_double_prime(rho, p.gamma); }
inline double v_triple_prime(double rho, const PotentialParams& p) { return v_triple_prime(rho, p.gamma); }
inline double c0_mean(double rho, const PotentialParams& p) { return c0_mean(rho, p.gamma); }

/// Glauber rate 1 - g s0 (sm + sp) + g^2 sm sp for spins in {-1,+1}.
/// Evaluated as (1 - g s0 sm)^2 or 1 - g^2 so that it is never negative in floating point.
inline double c0_rate(int sm, int s0, int sp, double gamma) {
  if (sm == sp) {
    const double q = 1.0 - gamma * s0 * sm;
    return q * q;
  }
  return (1.0 - gamma) * (1.0 + gamma);
}
inline double c0_rate(int sm, int s0, int sp, const PotentialParams& p) {
  return c0_rate(sm, s0, sp, p.gamma);
}

/// Rate for an occupation window encoded as bits (eta_{x-1}, eta_x, eta_{x+1}) = (b2, b1, b0).
inline double c0_rate_window(unsigned window, double gamma) {
  const int sm = (window & 4U) ? 1 : -1;
  const int s0 = (window & 2U) ? 1 : -1;
  const int sp = (window & 1U) ? 1 : -1;
  return c0_rate(sm, s0, sp, gamma);
}

std::array<double, 8> c0_rate_table(double gamma);

/// Compressibility chi(rho) = rho (1 - rho).
inline double chi(double rho) { return rho * (1.0 - rho); }

class StandingWave {
 public:
  explicit StandingWave(const PotentialParams& p);

  double amplitude() const { return amp_; }
  double decay() const { return decay_; }
  const PotentialParams& params() const { return p_; }

  double phi(double theta) const;
  double dphi(double theta) const;
  double d2phi(double theta) const;
  double d3phi(double theta) const;
  /// Closed-form L2(R) norm of phi'.
  double dphi_norm() const;

 private:
  PotentialParams p_;
  double amp_;
  double decay_;
};

StandingWave standing_wave(const PotentialParams& p);

/// e = phi' / |phi'|, an even function of theta, negative everywhere.
class InterfaceShape {
 public:
  explicit InterfaceShape(const StandingWave& w);

  double operator()(double theta) const { return e(theta); }
  double e(double theta) const;
  double de(double theta) const;
  double d2e(double theta) const;
  double decay() const { return b_; }

 private:
  double b_;
  double c_;
};

InterfaceShape e_shape(const StandingWave& w);

/// e_K on the circle of length P = sqrt(K): equal to e on |theta| <= P/4, then
/// the periodic image e(P - |theta|) is blended in with a quintic smoothstep
/// over P/4 <= |theta| <= P/2. The result is C^2 and periodic.
class TorusInterfaceShape {
 public:
  TorusInterfaceShape(const InterfaceShape& e, double K);

  double operator()(double theta) const { return value(theta); }
  double value(double theta) const;
  double d1(double theta) const;
  double d2(double theta) const;
  double period() const { return P_; }
  const InterfaceShape& base() const { return e_; }

 private:
  void eval(double theta, double out[3]) const;
  InterfaceShape e_;
  double P_;
};

struct VarpiResult {
  double value = 0.0;
  double diffusive = 0.0;  // integral of 2 chi(phi) (e')^2
  double reactive = 0.0;   // integral of c0_mean(phi) e^2
  double error_estimate = 0.0;
  double cutoff = 0.0;
};

/// Limit noise strength; throws ConvergenceError when the quadrature misses its tolerance.
VarpiResult varpi(const PotentialParams& p);

}  // namespace gk
