#include "gk/profile.hpp"

#include <algorithm>
#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/math/special_functions/jacobi_elliptic.hpp>
#include <cmath>
#include <fstream>
#include <limits>
#include "json.hpp"
#include <numbers>
#include <sstream>

#include "gk/errors.hpp"

namespace gk {

struct ProfileGrid::Spline {
  boost::math::interpolators::cardinal_cubic_b_spline<double> s;
};

namespace {

double agm(double a, double b) {
  for (int i = 0; i < 64 && std::abs(a - b) > 1e-16 * a; ++i) {
    const double an = 0.5 * (a + b);
    b = std::sqrt(a * b);
    a = an;
  }
  return 0.5 * (a + b);
}

// Orbit data parametrized by the complementary modulus q = k' of the sn solution.
struct Orbit {
  double y;  // gamma^2 M^2
  double A;  // u^2
  double period;
};

Orbit orbit_from_q(double a, double q) {
  const double q2 = q * q;
  Orbit o;
  o.y = 2.0 * a * (1.0 - q2) / (2.0 - q2);
  o.A = 2.0 * a / (2.0 - q2);
  const double Kk = std::numbers::pi / (2.0 * agm(1.0, q));
  o.period = 4.0 * Kk / std::sqrt(o.A);
  return o;
}

double wrap(double th, double P) {
  double r = std::fmod(th + 0.5 * P, P);
  if (r < 0) r += P;
  return r - 0.5 * P;
}

}  // namespace

double minimal_two_layer_K(const PotentialParams& p) {
  return 2.0 * std::numbers::pi * std::numbers::pi / well_coefficient(p.gamma);
}

double orbit_period(const PotentialParams& p, double M) {
  const double a = well_coefficient(p.gamma);
  const double y = p.gamma * p.gamma * M * M;
  if (!(M > 0.0) || !(y < a)) {
    throw DomainError("orbit_period: turning amplitude outside (0, sqrt(2 gamma - 1)/gamma)");
  }
  const double A = 2.0 * a - y;
  const double kc = std::sqrt(1.0 - y / A);
  return 4.0 * (std::numbers::pi / (2.0 * agm(1.0, kc))) / std::sqrt(A);
}

ProfileGrid solve_rho_K(const PotentialParams& pin, double K, std::size_t grid_points) {
  const PotentialParams p = PotentialParams::from_gamma(pin.gamma);
  if (!(K >= 4.0)) throw ParameterError("solve_rho_K: K must be at least 4");
  if (grid_points < 512) throw ParameterError("solve_rho_K: need at least 512 grid points");
  if (grid_points % 2 != 0) ++grid_points;
  const double a = well_coefficient(p.gamma);
  const double P = std::sqrt(K);
  const double Kmin = minimal_two_layer_K(p);
  if (P <= 2.0 * std::numbers::pi / std::sqrt(2.0 * a)) {
    std::ostringstream os;
    os << "no two-layer profile for K = " << K << " at gamma = " << p.gamma
       << ": every closed orbit around rho* has period above " << std::sqrt(Kmin)
       << ", so K must exceed " << Kmin;
    throw NoSolutionError(os.str());
  }

  // Period is decreasing in q = k'; root-find on log q.
  auto f = [&](double s) { return orbit_from_q(a, std::exp(s)).period - P; };
  double lo = -700.0, hi = 0.0;
  const double flo = f(lo), fhi = f(hi);
  if (!(flo > 0.0 && fhi < 0.0)) {
    std::ostringstream os;
    os << "solve_rho_K: period bracket failed, f(" << lo << ") = " << flo << ", f(" << hi << ") = " << fhi;
    throw ConvergenceError(os.str());
  }
  std::uintmax_t iters = 200;
  const auto root = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi,
                                                      boost::math::tools::eps_tolerance<double>(52), iters);
  if (iters >= 200) {
    std::ostringstream os;
    os << "solve_rho_K: root find did not converge in bracket [" << root.first << ", " << root.second << "]";
    throw ConvergenceError(os.str());
  }
  const double q = std::exp(0.5 * (root.first + root.second));
  const Orbit orb = orbit_from_q(a, q);

  ProfileGrid g;
  g.pot = p;
  g.K = K;
  g.period = P;
  g.turning = std::sqrt(orb.y) / p.gamma;
  g.elliptic_k = std::sqrt(1.0 - q * q);
  g.energy = orb.y * (2.0 * a - orb.y) / (8.0 * p.gamma * p.gamma);

  // First integral in closed form: rho = 1/2 - (M/2) sn(u theta, k). Only the
  // quarter period [0, P/4] is evaluated; the rest follows from the two
  // reflection symmetries rho(-t) = 1 - rho(t) and rho(P/2 - t) = rho(t).
  const double u = std::sqrt(orb.A);
  const double k = g.elliptic_k;
  const double M = g.turning;
  auto exact = [&](double t, double& r, double& dr) {
    double cn = 0.0, dn = 0.0;
    const double sn = boost::math::jacobi_elliptic(k, u * t, &cn, &dn);
    r = 0.5 - 0.5 * M * sn;
    dr = -0.5 * M * u * cn * dn;
  };
  const std::size_t n = grid_points;
  const double h = P / static_cast<double>(n);
  g.theta.resize(n);
  g.rho.resize(n);
  g.drho.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = -0.5 * P + static_cast<double>(i) * h;
    g.theta[i] = t;
    const double at = std::abs(t);
    const bool far = at > 0.25 * P;
    double r = 0.0, dr = 0.0;
    exact(far ? 0.5 * P - at : at, r, dr);
    if (far) dr = -dr;
    if (t < 0) {
      r = 1.0 - r;
    }
    g.rho[i] = r;
    g.drho[i] = dr;
  }
  g.rho[n / 2] = 0.5;
  g.rho[0] = 0.5;
  {
    double r = 0.0, dr = 0.0;
    exact(0.5 * P, r, dr);
    g.closure_error = std::abs(r - 0.5);
  }

  std::vector<double> closed(g.rho);
  closed.push_back(g.rho[0]);
  auto sp = std::make_shared<ProfileGrid::Spline>();
  sp->s = boost::math::interpolators::cardinal_cubic_b_spline<double>(
      closed.data(), closed.size(), -0.5 * P, h, g.drho[0], g.drho[0]);
  g.spline = sp;

  auto tol = boost::math::tools::eps_tolerance<double>(50);
  auto refine = [&](auto&& fn, double x0, double x1) {
    std::uintmax_t it = 100;
    const auto r = boost::math::tools::toms748_solve(fn, x0, x1, tol, it);
    return 0.5 * (r.first + r.second);
  };
  // second crossing sits at the seam, the extremes at -P/4 (max) and +P/4 (min)
  const double seam = refine([&](double x) { return g(x) - 0.5; }, 0.5 * P - 2 * h, 0.5 * P + 2 * h);
  const double xmin = refine([&](double x) { return g.derivative(x); }, 0.25 * P - 4 * h, 0.25 * P + 4 * h);
  const double xmax = refine([&](double x) { return g.derivative(x); }, -0.25 * P - 4 * h, -0.25 * P + 4 * h);
  g.h2 = seam / P;
  g.m1 = xmin / P;
  g.m2 = (xmax + P) / P;
  return g;
}

double ProfileGrid::operator()(double th) const { return spline->s(wrap(th, period)); }

double ProfileGrid::derivative(double th) const { return spline->s.prime(wrap(th, period)); }

double ProfileGrid::min_value() const { return *std::min_element(rho.begin(), rho.end()); }

double ProfileGrid::max_value() const { return *std::max_element(rho.begin(), rho.end()); }

double ProfileGrid::fd_residual() const {
  const std::size_t n = rho.size();
  const double h = spacing();
  double worst = 0.0;
  auto at = [&](std::ptrdiff_t i) {
    const auto nn = static_cast<std::ptrdiff_t>(n);
    return rho[static_cast<std::size_t>(((i % nn) + nn) % nn)];
  };
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::ptrdiff_t>(i);
    const double d2 = (-at(k - 2) + 16 * at(k - 1) - 30 * at(k) + 16 * at(k + 1) - at(k + 2)) / (12 * h * h);
    worst = std::max(worst, std::abs(d2 - v_prime(rho[i], pot)));
  }
  return worst;
}

double ProfileGrid::energy_drift() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    const double E = 0.5 * drho[i] * drho[i] - v(rho[i], pot);
    worst = std::max(worst, std::abs(E - energy) / energy);
  }
  return worst;
}

std::array<double, 4> ProfileGrid::derivative_bounds() const {
  std::array<double, 4> b{};
  for (std::size_t i = 0; i < rho.size(); ++i) {
    const double r = rho[i], d = drho[i];
    const double d2 = v_prime(r, pot);
    const double d3 = v_double_prime(r, pot) * d;
    const double d4 = v_triple_prime(r, pot) * d * d + v_double_prime(r, pot) * d2;
    b[0] = std::max(b[0], std::abs(d));
    b[1] = std::max(b[1], std::abs(d2));
    b[2] = std::max(b[2], std::abs(d3));
    b[3] = std::max(b[3], std::abs(d4));
  }
  return b;
}

std::string ProfileGrid::metadata_json() const {
  nlohmann::json j;
  j["gamma"] = pot.gamma;
  j["K"] = K;
  j["E"] = energy;
  j["h2"] = h2;
  j["m1"] = m1;
  j["m2"] = m2;
  j["grid_points"] = rho.size();
  j["turning_amplitude"] = turning;
  j["rho_min"] = min_value();
  j["rho_max"] = max_value();
  j["residuals"] = {{"finite_difference", fd_residual()},
                    {"energy_drift", energy_drift()},
                    {"closure", closure_error}};
  return j.dump(2);
}

void ProfileGrid::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.precision(17);
  out << "theta,rho_K,drho_K\n";
  for (std::size_t i = 0; i < rho.size(); ++i) out << theta[i] << ',' << rho[i] << ',' << drho[i] << '\n';
}

double glued_profile(const ProfileGrid& g, const StandingWave& w, double th) {
  double s = wrap(th, g.period) / g.period;
  if (s < 0) s += 1.0;
  const double m1 = 0.5 * g.h2;
  const double m2 = 0.5 * (1.0 + g.h2);
  if (s <= m1) return w.phi(s * g.period);
  if (s <= m2) return w.phi((g.h2 - s) * g.period);
  return w.phi((s - 1.0) * g.period);
}

double glued_distance(const ProfileGrid& g) {
  const StandingWave w(g.pot);
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    worst = std::max(worst, std::abs(g.rho[i] - glued_profile(g, w, g.theta[i])));
  }
  return worst;
}

LatticeProfile::LatticeProfile(int N, int d, double K, std::vector<double> values)
    : N_(N), d_(d), K_(K), u_(std::move(values)) {
  if (static_cast<int>(u_.size()) != N_) throw SizeError("LatticeProfile: line length must equal N");
}

LatticeProfile LatticeProfile::constant(int N, int d, double rho) {
  return LatticeProfile(N, d, 0.0, std::vector<double>(static_cast<std::size_t>(N), rho));
}

double LatticeProfile::at(int x1) const {
  const int r = ((x1 % N_) + N_) % N_;
  return u_[static_cast<std::size_t>(r)];
}

LatticeProfile discrete_profile(const ProfileGrid& g, int N, int d) {
  if (N < 8) throw ParameterError("discrete_profile: N must be at least 8");
  std::vector<double> u(static_cast<std::size_t>(N));
  for (int i = 0; i < N; ++i) {
    const int x1 = (i < N / 2) ? i : i - N;
    u[static_cast<std::size_t>(i)] = (x1 == 0) ? g.pot.rho_star : g(x1 * g.period / N);
  }
  return LatticeProfile(N, d, g.K, std::move(u));
}

double g0_polynomial(double rm, double r0, double rp, double gamma) {
  const double bm = 2 * rm - 1, b0 = 2 * r0 - 1, bp = 2 * rp - 1;
  return gamma * (bm + bp) - b0 - gamma * gamma * bm * b0 * bp;
}

double stationarity_residual(const LatticeProfile& u, double gamma) {
  const int N = u.N();
  const double N2 = static_cast<double>(N) * N;
  double worst = 0.0;
  for (int x = 0; x < N; ++x) {
    const double lap = N2 * (u.at(x + 1) + u.at(x - 1) - 2 * u.at(x));
    const double r = lap + u.K() * g0_polynomial(u.at(x - 1), u.at(x), u.at(x + 1), gamma);
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

double stationarity_residual(const ProfileGrid& g, int N) {
  return stationarity_residual(discrete_profile(g, N, 1), g.pot.gamma);
}

}  // namespace gk
