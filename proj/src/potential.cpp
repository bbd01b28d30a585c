#include "gk/potential.hpp"

#include <cmath>
#include <sstream>

#include "gk/errors.hpp"
#include "gk/quadrature.hpp"

namespace gk {

namespace {

void check_density(double rho, const char* what) {
  if (!(rho >= 0.0 && rho <= 1.0)) {
    std::ostringstream os;
    os << what << ": density " << rho << " outside [0,1]";
    throw DomainError(os.str());
  }
}

}  // namespace

PotentialParams PotentialParams::from_gamma(double gamma) {
  if (!(gamma > 0.5 && gamma <= 1.0)) {
    std::ostringstream os;
    os << "gamma = " << gamma << " has no double well; need 1/2 < gamma <= 1";
    throw ParameterError(os.str());
  }
  PotentialParams p;
  p.gamma = gamma;
  const double half_width = std::sqrt(well_coefficient(gamma)) / (2.0 * gamma);
  p.rho_star = 0.5;
  p.rho_plus = 0.5 + half_width;
  p.rho_minus = 0.5 - half_width;
  return p;
}

double v_prime(double rho, double gamma) {
  check_density(rho, "v_prime");
  const double m = 2.0 * rho - 1.0;
  return -well_coefficient(gamma) * m + gamma * gamma * m * m * m;
}

double v(double rho, double gamma) {
  check_density(rho, "v");
  const double m = 2.0 * rho - 1.0;
  const double m2 = m * m;
  return -0.25 * well_coefficient(gamma) * m2 + 0.125 * gamma * gamma * m2 * m2;
}

double v_double_prime(double rho, double gamma) {
  check_density(rho, "v_double_prime");
  const double m = 2.0 * rho - 1.0;
  return -2.0 * well_coefficient(gamma) + 6.0 * gamma * gamma * m * m;
}

double v_triple_prime(double rho, double gamma) {
  check_density(rho, "v_triple_prime");
  return 24.0 * gamma * gamma * (2.0 * rho - 1.0);
}

double c0_mean(double rho, double gamma) {
  check_density(rho, "c0_mean");
  const double m = 2.0 * rho - 1.0;
  return 1.0 - (2.0 * gamma - gamma * gamma) * m * m;
}

std::array<double, 8> c0_rate_table(double gamma) {
  std::array<double, 8> t{};
  for (unsigned w = 0; w < 8; ++w) t[w] = c0_rate_window(w, gamma);
  return t;
}

StandingWave::StandingWave(const PotentialParams& p)
    : p_(PotentialParams::from_gamma(p.gamma)),
      amp_(std::sqrt(well_coefficient(p.gamma)) / p.gamma),
      decay_(std::sqrt(well_coefficient(p.gamma))) {}

// phi = 1/2 - (amp/2) tanh(b t)
double StandingWave::phi(double t) const { return 0.5 - 0.5 * amp_ * std::tanh(decay_ * t); }

double StandingWave::dphi(double t) const {
  const double s = 1.0 / std::cosh(decay_ * t);
  return -0.5 * amp_ * decay_ * s * s;
}

double StandingWave::d2phi(double t) const {
  const double s = 1.0 / std::cosh(decay_ * t);
  return amp_ * decay_ * decay_ * s * s * std::tanh(decay_ * t);
}

double StandingWave::d3phi(double t) const {
  const double s = 1.0 / std::cosh(decay_ * t);
  const double th = std::tanh(decay_ * t);
  return amp_ * decay_ * decay_ * decay_ * s * s * (1.0 - 3.0 * th * th);
}

double StandingWave::dphi_norm() const {
  // |phi'|^2 = (amp b / 2)^2 * 4/(3b)
  return amp_ * std::sqrt(decay_ / 3.0);
}

StandingWave standing_wave(const PotentialParams& p) { return StandingWave(p); }

InterfaceShape::InterfaceShape(const StandingWave& w)
    : b_(w.decay()), c_(-0.5 * std::sqrt(3.0 * w.decay())) {}

double InterfaceShape::e(double t) const {
  const double s = 1.0 / std::cosh(b_ * t);
  return c_ * s * s;
}

double InterfaceShape::de(double t) const {
  const double s = 1.0 / std::cosh(b_ * t);
  return -2.0 * c_ * b_ * s * s * std::tanh(b_ * t);
}

double InterfaceShape::d2e(double t) const {
  const double s = 1.0 / std::cosh(b_ * t);
  const double th = std::tanh(b_ * t);
  return -2.0 * c_ * b_ * b_ * s * s * (1.0 - 3.0 * th * th);
}

InterfaceShape e_shape(const StandingWave& w) { return InterfaceShape(w); }

TorusInterfaceShape::TorusInterfaceShape(const InterfaceShape& e, double K) : e_(e), P_(std::sqrt(K)) {
  if (!(K > 0)) throw ParameterError("TorusInterfaceShape: K must be positive");
}

void TorusInterfaceShape::eval(double theta, double out[3]) const {
  double t = std::fmod(theta + 0.5 * P_, P_);
  if (t < 0) t += P_;
  t -= 0.5 * P_;
  const double sg = t < 0 ? -1.0 : 1.0;
  const double r = std::abs(t);
  out[0] = e_.e(r);
  out[1] = e_.de(r);
  out[2] = e_.d2e(r);
  const double q = 0.25 * P_;
  if (r > q) {
    const double s = (r - q) / q;
    const double w = s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
    const double w1 = 30.0 * s * s * (1.0 - s) * (1.0 - s) / q;
    const double w2 = 60.0 * s * (1.0 - s) * (1.0 - 2.0 * s) / (q * q);
    const double g0 = e_.e(P_ - r), g1 = -e_.de(P_ - r), g2 = e_.d2e(P_ - r);
    out[0] += w * g0;
    out[1] += w1 * g0 + w * g1;
    out[2] += w2 * g0 + 2.0 * w1 * g1 + w * g2;
  }
  out[1] *= sg;
}

double TorusInterfaceShape::value(double theta) const {
  double o[3];
  eval(theta, o);
  return o[0];
}

double TorusInterfaceShape::d1(double theta) const {
  double o[3];
  eval(theta, o);
  return o[1];
}

double TorusInterfaceShape::d2(double theta) const {
  double o[3];
  eval(theta, o);
  return o[2];
}

VarpiResult varpi(const PotentialParams& p) {
  const StandingWave w(p);
  const InterfaceShape e(w);
  const double cutoff = 40.0 / std::sqrt(well_coefficient(p.gamma));
  const double tol = 1e-10;
  auto diff = [&](double t) {
    const double de = e.de(t);
    return 2.0 * chi(w.phi(t)) * de * de;
  };
  auto reac = [&](double t) {
    const double ee = e.e(t);
    return c0_mean(w.phi(t), p.gamma) * ee * ee;
  };
  const auto qd = adaptive_simpson(diff, -cutoff, cutoff, 0.5 * tol);
  const auto qr = adaptive_simpson(reac, -cutoff, cutoff, 0.5 * tol);
  if (!qd.converged || !qr.converged) {
    std::ostringstream os;
    os << "varpi quadrature did not converge; achieved error " << qd.error_estimate + qr.error_estimate;
    throw ConvergenceError(os.str());
  }
  VarpiResult r;
  r.diffusive = qd.value;
  r.reactive = qr.value;
  r.value = qd.value + qr.value;
  r.error_estimate = qd.error_estimate + qr.error_estimate;
  r.cutoff = cutoff;
  return r;
}

}  // namespace gk
