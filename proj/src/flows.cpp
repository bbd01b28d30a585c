#include "gk/flows.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <sstream>

#include "gk/errors.hpp"

namespace gk {

namespace {

using Rational = boost::multiprecision::cpp_rational;

template <class T>
T triangle(int L, int z) {
  if (z < 0 || z > 2 * L - 2) return T(0);
  return T(L - std::abs(z - (L - 1))) / T(L * L);
}

template <class T>
BoxFunction<T> box(int side, int d) {
  BoxFunction<T> b;
  b.side = side;
  b.d = d;
  std::size_t n = 1;
  for (int j = 0; j < d; ++j) n *= static_cast<std::size_t>(side);
  b.values.assign(n, T(0));
  return b;
}

template <class T>
BoxFunction<T> m2_box(int ell, int d) {
  auto b = box<T>(2 * ell - 1, d);
  for (std::size_t i = 0; i < b.values.size(); ++i) {
    const Point p = b.point(i);
    T v(1);
    for (int j = 0; j < d; ++j) v *= triangle<T>(ell, p[static_cast<std::size_t>(j)]);
    b.values[i] = v;
  }
  return b;
}

// Flow components phi[k] for the chain of scales; see build_flow.
template <class T>
std::vector<BoxFunction<T>> build_components(int ell, int d) {
  const int side = 2 * ell - 1;
  std::vector<BoxFunction<T>> phi;
  for (int k = 0; k < d; ++k) phi.push_back(box<T>(side, d));
  std::vector<int> scales{1};
  while (scales.back() * 2 < ell) scales.push_back(scales.back() * 2);
  if (scales.back() != ell) scales.push_back(ell);

  std::vector<int> current(static_cast<std::size_t>(d), 1);
  for (std::size_t lvl = 1; lvl < scales.size(); ++lvl) {
    const int a = scales[lvl - 1], b = scales[lvl];
    for (int k = 0; k < d; ++k) {
      auto& ph = phi[static_cast<std::size_t>(k)];
      for (std::size_t i = 0; i < ph.values.size(); ++i) {
        Point p = ph.point(i);
        if (p[static_cast<std::size_t>(k)] != 0) continue;
        // weight of the other coordinates at their current scales
        T w(1);
        for (int j = 0; j < d; ++j) {
          if (j != k) w *= triangle<T>(current[static_cast<std::size_t>(j)], p[static_cast<std::size_t>(j)]);
        }
        if (w == T(0)) continue;
        T acc(0);
        for (int z = 0; z + 1 < side; ++z) {
          acc += w * (triangle<T>(a, z) - triangle<T>(b, z));
          p[static_cast<std::size_t>(k)] = z;
          ph.values[ph.index(p)] += acc;
        }
      }
      current[static_cast<std::size_t>(k)] = b;
    }
  }
  return phi;
}

template <class T>
T divergence_at(const std::vector<BoxFunction<T>>& phi, const Point& x, int d) {
  T s(0);
  for (int k = 0; k < d; ++k) {
    const auto& ph = phi[static_cast<std::size_t>(k)];
    s += ph.values[ph.index(x)];
    Point y = x;
    y[static_cast<std::size_t>(k)] -= 1;
    if (ph.contains(y)) s -= ph.values[ph.index(y)];
  }
  return s;
}

std::size_t shift(const Torus& t, std::size_t x, const Point& p) {
  int c[3] = {0, 0, 0};
  t.coords(x, c);
  for (int j = 0; j < t.d; ++j) {
    c[j] = ((c[j] + p[static_cast<std::size_t>(j)]) % t.N + t.N) % t.N;
  }
  return t.index(c);
}

}  // namespace

BoxFunction<double> m2_ell(int ell, int d) {
  if (ell < 1) throw ParameterError("m2_ell: ell must be at least 1");
  if (d < 1 || d > 3) throw ParameterError("m2_ell: d must be 1, 2 or 3");
  return m2_box<double>(ell, d);
}

double Flow::operator()(const Point& y, int k) const {
  const auto& ph = phi[static_cast<std::size_t>(k)];
  if (!ph.contains(y)) return 0.0;
  return ph.values[ph.index(y)];
}

double Flow::divergence(const Point& x) const { return divergence_at(phi, x, d); }

Flow build_flow(int ell, int d, bool verify_exact) {
  if (ell < 1) throw ParameterError("build_flow: ell must be at least 1");
  if (d < 1 || d > 3) throw ParameterError("build_flow: d must be 1, 2 or 3");
  Flow f;
  f.ell = ell;
  f.d = d;
  f.side = 2 * ell - 1;
  f.phi = build_components<double>(ell, d);

  const auto target = m2_box<double>(ell, d);
  double worst = 0.0;
  for (std::size_t i = 0; i < target.values.size(); ++i) {
    const Point p = target.point(i);
    const double want = (i == 0 ? 1.0 : 0.0) - target.values[i];
    worst = std::max(worst, std::abs(divergence_at(f.phi, p, d) - want));
  }
  f.divergence_error = worst;
  for (const auto& ph : f.phi) {
    for (double v : ph.values) f.energy += v * v;
  }

  if (verify_exact) {
    const auto exact = build_components<Rational>(ell, d);
    const auto m2 = m2_box<Rational>(ell, d);
    for (std::size_t i = 0; i < m2.values.size(); ++i) {
      const Point p = m2.point(i);
      const Rational want = (i == 0 ? Rational(1) : Rational(0)) - m2.values[i];
      if (divergence_at(exact, p, d) != want) {
        std::ostringstream os;
        os << "build_flow: divergence mismatch at site " << i << " for ell = " << ell << ", d = " << d;
        throw ConvergenceError(os.str());
      }
    }
    f.exact = true;
    f.divergence_error = 0.0;
  } else if (worst > 1e-12) {
    std::ostringstream os;
    os << "build_flow: divergence error " << worst << " for ell = " << ell << ", d = " << d;
    throw ConvergenceError(os.str());
  }
  return f;
}

double g_d(double ell, int d) {
  if (d == 1) return ell;
  if (d == 2) return std::log(ell);
  return 1.0;
}

EllSequences ell_sequences(int N, int d) {
  if (N < 2) throw ParameterError("ell_sequences: N must be at least 2");
  if (d < 1) throw ParameterError("ell_sequences: d must be positive");
  EllSequences r;
  const double n = N;
  if (d == 1) {
    r.ell = std::pow(n, 0.8);
  } else if (d == 2) {
    auto f = [&](double l) { return 3.0 * std::log(l) + std::log(std::log(l)) - 2.0 * std::log(n); };
    boost::uintmax_t iters = 200;
    const auto br = boost::math::tools::toms748_solve(f, 1.0 + 1e-12, n + 2.0,
                                                      boost::math::tools::eps_tolerance<double>(50), iters);
    r.ell = 0.5 * (br.first + br.second);
  } else {
    r.ell = std::pow(n, 4.0 / (3.0 * d));
  }
  r.g = g_d(r.ell, d);
  r.s = std::pow(r.ell, d) * r.g;
  r.R = std::pow(n / r.ell, d);
  return r;
}

double omega_ell(const Configuration& c, const LatticeProfile& u, std::size_t x, int ell) {
  const Torus& t = c.torus();
  if (4 * ell >= t.N) throw SizeError("omega_ell: requires 4 ell < N");
  const auto m = m2_ell(ell, t.d);
  double s = 0.0;
  for (std::size_t i = 0; i < m.values.size(); ++i) {
    const std::size_t y = shift(t, x, m.point(i));
    s += m.values[i] * (c.eta(y) - u.at_site(y));
  }
  return s;
}

double omega_ell_variance(const LatticeProfile& u, const Torus& t, std::size_t x, int ell) {
  if (4 * ell >= t.N) throw SizeError("omega_ell_variance: requires 4 ell < N");
  const auto m = m2_ell(ell, t.d);
  double s = 0.0;
  for (std::size_t i = 0; i < m.values.size(); ++i) {
    const double r = u.at_site(shift(t, x, m.point(i)));
    s += m.values[i] * m.values[i] * r * (1.0 - r);
  }
  return s;
}

Point maximal_point(const std::vector<Point>& A, int d) {
  if (A.empty()) throw ParameterError("maximal_point: empty pattern");
  auto below = [&](const Point& p, const Point& q) {
    for (int j = 0; j < d; ++j) {
      if (p[static_cast<std::size_t>(j)] > q[static_cast<std::size_t>(j)]) return false;
    }
    return true;
  };
  bool found = false;
  Point best{0, 0, 0};
  for (const auto& p : A) {
    bool maximal = true;
    for (const auto& q : A) {
      if (q != p && below(p, q)) maximal = false;
    }
    if (maximal && (!found || std::lexicographical_compare(best.begin(), best.begin() + d, p.begin(), p.begin() + d))) {
      best = p;
      found = true;
    }
  }
  return best;
}

namespace {

struct Pattern {
  Point top;
  std::vector<Point> rest;
};

Pattern split_pattern(const std::vector<Point>& A, const Torus& t) {
  if (A.size() < 2) throw ParameterError("w_decomposition: pattern needs at least two elements");
  for (int j = 0; j < t.d; ++j) {
    int lo = A[0][static_cast<std::size_t>(j)], hi = lo;
    for (const auto& p : A) {
      lo = std::min(lo, p[static_cast<std::size_t>(j)]);
      hi = std::max(hi, p[static_cast<std::size_t>(j)]);
    }
    if (hi - lo >= t.N) throw SizeError("w_decomposition: pattern larger than the torus");
  }
  Pattern pt;
  pt.top = maximal_point(A, t.d);
  bool removed = false;
  for (const auto& p : A) {
    if (!removed && p == pt.top) {
      removed = true;
      continue;
    }
    pt.rest.push_back(p);
  }
  return pt;
}

double omega_product(const Configuration& c, const LatticeProfile& u, std::size_t x, const std::vector<Point>& P) {
  double r = 1.0;
  for (const auto& p : P) {
    const std::size_t y = shift(c.torus(), x, p);
    r *= c.eta(y) - u.at_site(y);
  }
  return r;
}


}  // namespace

double H_ell(const Flow& flow, const std::vector<double>& G, const std::vector<Point>& A, const Configuration& c,
             const LatticeProfile& u, int k, std::size_t x) {
  const Torus& t = c.torus();
  const Pattern pt = split_pattern(A, t);
  const auto& ph = flow.phi[static_cast<std::size_t>(k)];
  double s = 0.0;
  for (std::size_t i = 0; i < ph.values.size(); ++i) {
    if (ph.values[i] == 0.0) continue;
    const Point y = ph.point(i);
    Point off{};
    for (std::size_t j = 0; j < 3; ++j) off[j] = -pt.top[j] - y[j];
    const std::size_t z = shift(t, x, off);
    s += ph.values[i] * G[z] * omega_product(c, u, z, pt.rest);
  }
  return s;
}

WDecomposition w_decomposition(const std::vector<double>& G, const std::vector<Point>& A, const Configuration& c,
                               const LatticeProfile& u, const Flow& flow) {
  const Torus& t = c.torus();
  if (G.size() != t.sites()) throw ParameterError("w_decomposition: G must have one value per site");
  if (flow.d != t.d) throw ParameterError("w_decomposition: flow dimension differs from the torus");
  if (flow.side > t.N) throw SizeError("w_decomposition: flow box larger than the torus");
  const Pattern pt = split_pattern(A, t);
  const auto m = m2_ell(flow.ell, t.d);
  const std::size_t S = t.sites();

  std::vector<double> w(S), wl(S, 0.0);
  for (std::size_t x = 0; x < S; ++x) w[x] = c.eta(x) - u.at_site(x);
  for (std::size_t x = 0; x < S; ++x) {
    for (std::size_t i = 0; i < m.values.size(); ++i) wl[x] += m.values[i] * w[shift(t, x, m.point(i))];
  }
  WDecomposition r;
  for (std::size_t x = 0; x < S; ++x) {
    const double rest = G[x] * omega_product(c, u, x, pt.rest);
    const std::size_t top = shift(t, x, pt.top);
    r.W += rest * w[top];
    r.W1 += rest * wl[top];
    r.W2 += rest * (w[top] - wl[top]);
  }
  for (int k = 0; k < t.d; ++k) {
    for (std::size_t x = 0; x < S; ++x) {
      const double h = H_ell(flow, G, A, c, u, k, x);
      r.W2_flow += (w[x] - w[t.neighbor(x, k, +1)]) * h;
    }
  }
  return r;
}

}  // namespace gk
