#include "gk/spectral.hpp"

#include <fftw3.h>
#include <lapacke.h>

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "gk/errors.hpp"
#include "gk/quadrature.hpp"

namespace gk {

namespace {

constexpr double kFourPi2 = 4.0 * std::numbers::pi * std::numbers::pi;

// Zig-zag order 0, n-1, 1, n-2, ... puts every cyclic neighbor pair within
// distance 2, so the periodic operator becomes a band matrix with kd = 2.
void top_decomposition(SLOperator& sl, std::size_t top) {
  const auto n = static_cast<lapack_int>(sl.size());
  if (static_cast<lapack_int>(top) > n) top = static_cast<std::size_t>(n);
  std::vector<lapack_int> perm(static_cast<std::size_t>(n)), inv(static_cast<std::size_t>(n));
  for (lapack_int p = 0; p < n; ++p) {
    const lapack_int i = (p % 2 == 0) ? p / 2 : n - 1 - p / 2;
    perm[static_cast<std::size_t>(p)] = i;
    inv[static_cast<std::size_t>(i)] = p;
  }
  const lapack_int kd = 2;
  const lapack_int ldab = kd + 1;
  std::vector<double> ab(static_cast<std::size_t>(ldab) * static_cast<std::size_t>(n), 0.0);
  auto put = [&](lapack_int r, lapack_int c, double v) {
    if (r > c) std::swap(r, c);
    ab[static_cast<std::size_t>(c) * static_cast<std::size_t>(ldab) + static_cast<std::size_t>(kd + r - c)] += v;
  };
  const double ih2 = 1.0 / (sl.h * sl.h);
  for (lapack_int i = 0; i < n; ++i) {
    const lapack_int p = inv[static_cast<std::size_t>(i)];
    put(p, p, -2.0 * ih2 - sl.potential[static_cast<std::size_t>(i)]);
    put(p, inv[static_cast<std::size_t>((i + 1) % n)], ih2);
  }
  const auto m_req = static_cast<lapack_int>(top);
  std::vector<double> q(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  std::vector<double> w(static_cast<std::size_t>(n));
  std::vector<double> z(static_cast<std::size_t>(n) * static_cast<std::size_t>(m_req));
  std::vector<lapack_int> ifail(static_cast<std::size_t>(n));
  lapack_int m = 0;
  const lapack_int info = LAPACKE_dsbevx(LAPACK_COL_MAJOR, 'V', 'I', 'U', n, kd, ab.data(), ldab, q.data(), n, 0.0,
                                         0.0, n - m_req + 1, n, 2.0 * LAPACKE_dlamch('S'), &m, w.data(), z.data(), n,
                                         ifail.data());
  if (info != 0 || m != m_req) {
    std::ostringstream os;
    os << "dsbevx failed: info = " << info << ", found " << m << " of " << m_req << " eigenpairs";
    throw ConvergenceError(os.str());
  }
  const double scale = 1.0 / std::sqrt(sl.h);
  sl.eigenvalues.resize(static_cast<std::size_t>(m));
  sl.eigenvectors.resize(n, m);
  for (lapack_int k = 0; k < m; ++k) {
    const lapack_int src = m - 1 - k;
    sl.eigenvalues[static_cast<std::size_t>(k)] = w[static_cast<std::size_t>(src)];
    for (lapack_int p = 0; p < n; ++p) {
      sl.eigenvectors(perm[static_cast<std::size_t>(p)], k) =
          scale * z[static_cast<std::size_t>(src) * static_cast<std::size_t>(n) + static_cast<std::size_t>(p)];
    }
  }
}

// The full set also comes from the band solver. The bundled OpenBLAS picks a
// kernel on some AVX-512 hosts that returns non-orthogonal vectors from the
// dense drivers (dsyevr, dsyev, dsbevd) for n >= ~600.
void full_decomposition(SLOperator& sl) {
  if (sl.size() > 4096) throw SizeError("assemble_sl: full decomposition limited to 4096 points");
  top_decomposition(sl, sl.size());
}

}  // namespace

std::vector<double> SLOperator::apply(const std::vector<double>& f) const {
  const std::size_t n = size();
  std::vector<double> r(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double l = f[(i + n - 1) % n], c = f[i], rr = f[(i + 1) % n];
    r[i] = (l - 2 * c + rr) / (h * h) - potential[i] * c;
  }
  return r;
}

double SLOperator::inner(const std::vector<double>& a, const std::vector<double>& b) const {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s * h;
}

double SLOperator::norm(const std::vector<double>& a) const { return std::sqrt(inner(a, a)); }

std::vector<double> SLOperator::eigenvector(std::size_t k) const {
  std::vector<double> v(size());
  for (std::size_t i = 0; i < size(); ++i) v[i] = eigenvectors(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
  return v;
}

SLOperator assemble_sl_from_potential(std::vector<double> potential, double K, std::size_t top) {
  if (potential.size() < 512) throw ParameterError("assemble_sl: need at least 512 grid points");
  SLOperator sl;
  sl.K = K;
  sl.period = std::sqrt(K);
  const std::size_t n = potential.size();
  sl.h = sl.period / static_cast<double>(n);
  sl.theta.resize(n);
  for (std::size_t i = 0; i < n; ++i) sl.theta[i] = -0.5 * sl.period + static_cast<double>(i) * sl.h;
  sl.potential = std::move(potential);
  if (top == 0) {
    full_decomposition(sl);
  } else {
    top_decomposition(sl, top);
  }
  return sl;
}

SLOperator assemble_sl(const ProfileGrid& g, const PotentialParams& p, std::size_t grid_points, std::size_t top) {
  if (grid_points < 512) throw ParameterError("assemble_sl: need at least 512 grid points");
  const double P = g.period;
  const double h = P / static_cast<double>(grid_points);
  std::vector<double> pot(grid_points);
  for (std::size_t i = 0; i < grid_points; ++i) {
    const double r = std::clamp(g(-0.5 * P + static_cast<double>(i) * h), 0.0, 1.0);
    pot[i] = v_double_prime(r, p);
  }
  return assemble_sl_from_potential(std::move(pot), g.K, top);
}

std::vector<double> semigroup_apply(const SLOperator& sl, double t, const std::vector<double>& F, double K) {
  if (!sl.full()) throw ParameterError("semigroup_apply: needs the full eigendecomposition");
  if (t < 0) throw ParameterError("semigroup_apply: t must be nonnegative");
  const auto n = static_cast<Eigen::Index>(sl.size());
  Eigen::Map<const Eigen::VectorXd> f(F.data(), n);
  Eigen::VectorXd c = sl.h * (sl.eigenvectors.transpose() * f);
  for (Eigen::Index k = 0; k < n; ++k) c(k) *= std::exp(t * K * sl.eigenvalues[static_cast<std::size_t>(k)]);
  const Eigen::VectorXd r = sl.eigenvectors * c;
  return std::vector<double>(r.data(), r.data() + n);
}

std::vector<double> heat_semigroup(const std::vector<double>& g, double t) {
  if (t < 0) throw ParameterError("heat_semigroup: t must be nonnegative");
  const int n = static_cast<int>(g.size());
  if (n == 0) return {};
  std::vector<double> in(g);
  std::vector<std::complex<double>> spec(static_cast<std::size_t>(n / 2 + 1));
  auto* cs = reinterpret_cast<fftw_complex*>(spec.data());
  fftw_plan fwd = fftw_plan_dft_r2c_1d(n, in.data(), cs, FFTW_ESTIMATE);
  fftw_execute(fwd);
  fftw_destroy_plan(fwd);
  for (int k = 0; k <= n / 2; ++k) spec[static_cast<std::size_t>(k)] *= std::exp(-kFourPi2 * k * k * t) / n;
  std::vector<double> out(g.size());
  fftw_plan bwd = fftw_plan_dft_c2r_1d(n, cs, out.data(), FFTW_ESTIMATE);
  fftw_execute(bwd);
  fftw_destroy_plan(bwd);
  return out;
}

GroundStateReport ground_state_report(const SLOperator& sl, const ProfileGrid& g) {
  if (sl.eigenvalues.size() < 2) throw ParameterError("ground_state_report: need at least two eigenpairs");
  const InterfaceShape e{StandingWave(g.pot)};
  const TorusInterfaceShape eK(e, g.K);
  const std::size_t n = sl.size();
  std::vector<double> ek(n), dr(n);
  for (std::size_t i = 0; i < n; ++i) {
    ek[i] = eK(sl.theta[i]);
    dr[i] = g.derivative(sl.theta[i]);
  }
  const double nk = sl.norm(ek);
  for (auto& v : ek) v /= nk;
  GroundStateReport r;
  r.lambda0 = sl.eigenvalues[0];
  r.lambda1 = sl.eigenvalues[1];
  r.gap = r.lambda0 - r.lambda1;
  auto psi0 = sl.eigenvector(0);
  auto psi1 = sl.eigenvector(1);
  const double c0 = sl.inner(psi0, ek), c1 = sl.inner(psi1, ek);
  const double sgn = c0 < 0 ? -1.0 : 1.0;
  std::vector<double> diff(n), loc(n);
  const double cn = std::sqrt(c0 * c0 + c1 * c1);
  for (std::size_t i = 0; i < n; ++i) {
    diff[i] = sgn * psi0[i] - ek[i];
    loc[i] = (c0 * psi0[i] + c1 * psi1[i]) / cn - ek[i];
  }
  r.distance_psi0 = sl.norm(diff);
  r.distance_localized = sl.norm(loc);
  const auto adr = sl.apply(dr);
  r.derivative_residual = sl.norm(adr) / sl.norm(dr);
  return r;
}

double she_mode_covariance(int k, double s, double t, double varpi) {
  if (s > t) std::swap(s, t);
  if (k == 0) return varpi * s;
  const double a = kFourPi2 * k * k;
  return varpi * (std::exp(-a * (t - s)) - std::exp(-a * (t + s))) / (2.0 * a);
}

double limit_covariance(const TestFunction& F, const TestFunction& G, double s, double t, const PotentialParams& p,
                        int d) {
  if (s > t) std::swap(s, t);
  const InterfaceShape e{StandingWave(p)};
  const double w = varpi(p).value;
  if (d == 1) return w * F.inner_e(e) * G.inner_e(e) * s;
  const auto pf = F.projection(e);
  const auto pg = G.projection(e);
  double total = 0.0;
  for (const auto& [mode, a] : pf) {
    const auto it = pg.find(mode);
    if (it == pg.end()) continue;
    total += a * it->second * mode.norm_sq() * she_mode_covariance(mode.k, s, t, w);
  }
  return total;
}

double limit_covariance_quadrature(const TestFunction& F, const TestFunction& G, double s, double t,
                                   const PotentialParams& p, int d, std::size_t theta_points) {
  if (s > t) std::swap(s, t);
  const StandingWave wv(p);
  const InterfaceShape e(wv);
  // noise integrals over the normal coordinate, computed directly rather than through varpi()
  const double L = 40.0 / std::sqrt(well_coefficient(p.gamma));
  const double diffusive = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      [&](double x) {
        const double de = e.de(x);
        return 2.0 * chi(wv.phi(x)) * de * de;
      },
      -L, L, 15, 1e-14);
  const double reactive = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      [&](double x) {
        const double ee = e.e(x);
        return c0_mean(wv.phi(x), p) * ee * ee;
      },
      -L, L, 15, 1e-14);
  const double noise = diffusive + reactive;

  // <F>(theta), <G>(theta) sampled on the transverse grid
  const std::size_t m = d == 1 ? 1 : theta_points;
  std::vector<double> fg(m, 0.0), gg(m, 0.0);
  for (const auto& term : F.terms()) {
    const double c = adaptive_simpson([&](double x) { return term.f.value(x) * e.e(x); }, term.f.support().first,
                                      term.f.support().second, 1e-13)
                         .value;
    for (std::size_t i = 0; i < m; ++i) fg[i] += term.coeff * c * term.g.value(static_cast<double>(i) / m);
  }
  for (const auto& term : G.terms()) {
    const double c = adaptive_simpson([&](double x) { return term.f.value(x) * e.e(x); }, term.f.support().first,
                                      term.f.support().second, 1e-13)
                         .value;
    for (std::size_t i = 0; i < m; ++i) gg[i] += term.coeff * c * term.g.value(static_cast<double>(i) / m);
  }
  if (d == 1) return noise * fg[0] * gg[0] * s;

  auto integrand = [&](double r) {
    const auto a = heat_semigroup(fg, t - r);
    const auto b = heat_semigroup(gg, s - r);
    double sum = 0.0;
    for (std::size_t i = 0; i < m; ++i) sum += a[i] * b[i];
    return sum / static_cast<double>(m);
  };
  const double time_part =
      boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, 0.0, s, 12, 1e-13);
  return noise * time_part;
}

}  // namespace gk
