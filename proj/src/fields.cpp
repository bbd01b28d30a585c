#include "gk/fields.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "gk/errors.hpp"
#include "gk/quadrature.hpp"

namespace gk {

namespace {

constexpr double kGaussCut = 8.0;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

TorusInterfaceShape interface_of(const NormalProfile& p) {
  return TorusInterfaceShape(InterfaceShape(StandingWave(PotentialParams::from_gamma(p.gamma))), p.K);
}

const char* kind_name(NormalProfile::Kind k) {
  switch (k) {
    case NormalProfile::Kind::Gaussian: return "gaussian";
    case NormalProfile::Kind::Bump: return "bump";
    case NormalProfile::Kind::GaussianDerivative: return "gaussian_derivative";
    case NormalProfile::Kind::Interface: return "interface";
  }
  return "?";
}

NormalProfile::Kind kind_from(const std::string& s) {
  if (s == "gaussian") return NormalProfile::Kind::Gaussian;
  if (s == "bump") return NormalProfile::Kind::Bump;
  if (s == "gaussian_derivative") return NormalProfile::Kind::GaussianDerivative;
  if (s == "interface") return NormalProfile::Kind::Interface;
  throw ParameterError("unknown test-function family '" + s + "'");
}

const char* mode_name(TransverseMode::Kind k) {
  switch (k) {
    case TransverseMode::Kind::Constant: return "constant";
    case TransverseMode::Kind::Cos: return "cos";
    case TransverseMode::Kind::Sin: return "sin";
  }
  return "?";
}

TransverseMode::Kind mode_from(const std::string& s) {
  if (s == "constant") return TransverseMode::Kind::Constant;
  if (s == "cos") return TransverseMode::Kind::Cos;
  if (s == "sin") return TransverseMode::Kind::Sin;
  throw ParameterError("unknown transverse mode '" + s + "'");
}

double integrate_normal(const std::function<double(double)>& f, std::pair<double, double> s) {
  return adaptive_simpson(f, s.first, s.second, 1e-13, 64).value;
}

}  // namespace

double NormalProfile::value(double t) const {
  const double u = (t - center) / width;
  switch (kind) {
    case Kind::Gaussian:
      return std::abs(u) > kGaussCut ? 0.0 : amplitude * std::exp(-0.5 * u * u);
    case Kind::GaussianDerivative:
      return std::abs(u) > kGaussCut ? 0.0 : amplitude * u * std::exp(-0.5 * u * u);
    case Kind::Bump: {
      if (std::abs(u) >= 1.0) return 0.0;
      return amplitude * std::exp(1.0 - 1.0 / (1.0 - u * u));
    }
    case Kind::Interface: {
      const double P = std::sqrt(K);
      if (std::abs(t - center) > 0.5 * P) return 0.0;
      return amplitude * interface_of(*this).value(t - center);
    }
  }
  return 0.0;
}

double NormalProfile::d1(double t) const {
  const double u = (t - center) / width;
  switch (kind) {
    case Kind::Gaussian:
      return std::abs(u) > kGaussCut ? 0.0 : -amplitude * u * std::exp(-0.5 * u * u) / width;
    case Kind::GaussianDerivative:
      return std::abs(u) > kGaussCut ? 0.0 : amplitude * (1.0 - u * u) * std::exp(-0.5 * u * u) / width;
    case Kind::Bump: {
      if (std::abs(u) >= 1.0) return 0.0;
      const double s = 1.0 - u * u;
      return value(t) * (-2.0 * u / (s * s)) / width;
    }
    case Kind::Interface: {
      const double P = std::sqrt(K);
      if (std::abs(t - center) > 0.5 * P) return 0.0;
      return amplitude * interface_of(*this).d1(t - center);
    }
  }
  return 0.0;
}

double NormalProfile::d2(double t) const {
  const double u = (t - center) / width;
  switch (kind) {
    case Kind::Gaussian:
      return std::abs(u) > kGaussCut ? 0.0 : amplitude * (u * u - 1.0) * std::exp(-0.5 * u * u) / (width * width);
    case Kind::GaussianDerivative:
      return std::abs(u) > kGaussCut ? 0.0
                                     : amplitude * (u * u * u - 3.0 * u) * std::exp(-0.5 * u * u) / (width * width);
    case Kind::Bump: {
      if (std::abs(u) >= 1.0) return 0.0;
      const double s = 1.0 - u * u;
      const double f = value(t);
      return f * (4.0 * u * u / (s * s * s * s) - 2.0 / (s * s) - 8.0 * u * u / (s * s * s)) / (width * width);
    }
    case Kind::Interface: {
      const double P = std::sqrt(K);
      if (std::abs(t - center) > 0.5 * P) return 0.0;
      return amplitude * interface_of(*this).d2(t - center);
    }
  }
  return 0.0;
}

std::pair<double, double> NormalProfile::support() const {
  switch (kind) {
    case Kind::Gaussian:
    case Kind::GaussianDerivative:
      return {center - kGaussCut * width, center + kGaussCut * width};
    case Kind::Bump:
      return {center - width, center + width};
    case Kind::Interface: {
      const double P = std::sqrt(K);
      return {center - 0.5 * P, center + 0.5 * P};
    }
  }
  return {0.0, 0.0};
}

double TransverseMode::value(double th) const {
  switch (kind) {
    case Kind::Constant: return 1.0;
    case Kind::Cos: return std::cos(kTwoPi * k * th);
    case Kind::Sin: return std::sin(kTwoPi * k * th);
  }
  return 0.0;
}

double TransverseMode::d1(double th) const {
  switch (kind) {
    case Kind::Constant: return 0.0;
    case Kind::Cos: return -kTwoPi * k * std::sin(kTwoPi * k * th);
    case Kind::Sin: return kTwoPi * k * std::cos(kTwoPi * k * th);
  }
  return 0.0;
}

TestFunction::TestFunction(std::string name, std::vector<Term> terms)
    : name_(std::move(name)), terms_(std::move(terms)) {}

TestFunction TestFunction::gaussian(double center, double sd, double amplitude) {
  NormalProfile f{NormalProfile::Kind::Gaussian, center, sd, amplitude};
  std::ostringstream os;
  os << "gaussian(" << center << ',' << sd << ')';
  return TestFunction(os.str(), {{1.0, f, {}}});
}

TestFunction TestFunction::bump(double center, double radius, double amplitude) {
  NormalProfile f{NormalProfile::Kind::Bump, center, radius, amplitude};
  std::ostringstream os;
  os << "bump(" << center << ',' << radius << ')';
  return TestFunction(os.str(), {{1.0, f, {}}});
}

TestFunction TestFunction::gaussian_derivative(double center, double sd, double amplitude) {
  NormalProfile f{NormalProfile::Kind::GaussianDerivative, center, sd, amplitude};
  std::ostringstream os;
  os << "gaussian_derivative(" << center << ',' << sd << ')';
  return TestFunction(os.str(), {{1.0, f, {}}});
}

TestFunction TestFunction::interface(const PotentialParams& p, double K, double amplitude) {
  NormalProfile f{NormalProfile::Kind::Interface, 0.0, 0.5 * std::sqrt(K), amplitude, p.gamma, K};
  return TestFunction("interface", {{1.0, f, {}}});
}

TestFunction TestFunction::with_mode(TransverseMode m) const {
  TestFunction r = *this;
  for (auto& t : r.terms_) {
    if (t.g.kind != TransverseMode::Kind::Constant) throw ParameterError("with_mode: term already has a mode");
    t.g = m;
  }
  std::ostringstream os;
  os << name_ << '*' << mode_name(m.kind) << m.k;
  r.name_ = os.str();
  return r;
}

double TestFunction::operator()(double t, double th) const {
  double s = 0.0;
  for (const auto& term : terms_) s += term.coeff * term.f.value(t) * term.g.value(th);
  return s;
}

double TestFunction::d_normal(double t, double th) const {
  double s = 0.0;
  for (const auto& term : terms_) s += term.coeff * term.f.d1(t) * term.g.value(th);
  return s;
}

double TestFunction::d_transverse(double t, double th) const {
  double s = 0.0;
  for (const auto& term : terms_) s += term.coeff * term.f.value(t) * term.g.d1(th);
  return s;
}

std::pair<double, double> TestFunction::support() const {
  if (terms_.empty()) return {0.0, 0.0};
  auto s = terms_.front().f.support();
  for (const auto& t : terms_) {
    const auto r = t.f.support();
    s.first = std::min(s.first, r.first);
    s.second = std::max(s.second, r.second);
  }
  return s;
}

namespace {

// Integral over R x T of sum_{a,b} c_a c_b f_a g_b-type products, using mode orthogonality.
template <class FA, class GA>
double mode_weighted_norm(const std::vector<TestFunction::Term>& terms, FA fa, GA ga,
                          std::pair<double, double> sup) {
  double total = 0.0;
  for (const auto& a : terms) {
    for (const auto& b : terms) {
      const double gg = ga(a.g, b.g);
      if (gg == 0.0) continue;
      const double ff = integrate_normal([&](double t) { return fa(a.f, t) * fa(b.f, t); }, sup);
      total += a.coeff * b.coeff * ff * gg;
    }
  }
  return total;
}

double mode_overlap(const TransverseMode& a, const TransverseMode& b) {
  return a == b ? a.norm_sq() : 0.0;
}

double mode_derivative_overlap(const TransverseMode& a, const TransverseMode& b) {
  if (!(a == b) || a.kind == TransverseMode::Kind::Constant) return 0.0;
  return kTwoPi * kTwoPi * a.k * a.k * 0.5;
}

}  // namespace

double TestFunction::l2_norm_sq() const {
  return mode_weighted_norm(
      terms_, [](const NormalProfile& f, double t) { return f.value(t); }, mode_overlap, support());
}

double TestFunction::d_normal_norm_sq() const {
  return mode_weighted_norm(
      terms_, [](const NormalProfile& f, double t) { return f.d1(t); }, mode_overlap, support());
}

double TestFunction::d_transverse_norm_sq() const {
  return mode_weighted_norm(
      terms_, [](const NormalProfile& f, double t) { return f.value(t); }, mode_derivative_overlap, support());
}

std::map<TransverseMode, double> TestFunction::projection(const InterfaceShape& e) const {
  std::map<TransverseMode, double> out;
  for (const auto& t : terms_) {
    const double v = integrate_normal([&](double x) { return t.f.value(x) * e.e(x); }, t.f.support());
    out[t.g] += t.coeff * v;
  }
  return out;
}

double TestFunction::inner_e(const InterfaceShape& e) const {
  const auto p = projection(e);
  const auto it = p.find(TransverseMode{});
  return it == p.end() ? 0.0 : it->second;
}

TestFunction operator+(const TestFunction& a, const TestFunction& b) {
  TestFunction r = a;
  r.terms_.insert(r.terms_.end(), b.terms_.begin(), b.terms_.end());
  r.name_ = a.name_ + "+" + b.name_;
  return r;
}

TestFunction operator*(double s, const TestFunction& a) {
  TestFunction r = a;
  for (auto& t : r.terms_) t.coeff *= s;
  std::ostringstream os;
  os << s << '*' << a.name_;
  r.name_ = os.str();
  return r;
}

nlohmann::json TestFunction::to_json() const {
  nlohmann::json j;
  j["name"] = name_;
  j["terms"] = nlohmann::json::array();
  for (const auto& t : terms_) {
    nlohmann::json tj;
    tj["coeff"] = t.coeff;
    tj["family"] = kind_name(t.f.kind);
    tj["center"] = t.f.center;
    tj["width"] = t.f.width;
    tj["amplitude"] = t.f.amplitude;
    if (t.f.kind == NormalProfile::Kind::Interface) {
      tj["gamma"] = t.f.gamma;
      tj["K"] = t.f.K;
    }
    tj["mode"] = mode_name(t.g.kind);
    tj["k"] = t.g.k;
    j["terms"].push_back(tj);
  }
  return j;
}

TestFunction TestFunction::from_json(const nlohmann::json& j) {
  std::vector<Term> terms;
  if (j.contains("terms")) {
    for (const auto& tj : j.at("terms")) {
      Term t;
      t.coeff = tj.value("coeff", 1.0);
      t.f.kind = kind_from(tj.at("family").get<std::string>());
      t.f.center = tj.value("center", 0.0);
      t.f.width = tj.value("width", 1.0);
      t.f.amplitude = tj.value("amplitude", 1.0);
      t.f.gamma = tj.value("gamma", 0.75);
      t.f.K = tj.value("K", 0.0);
      t.g.kind = mode_from(tj.value("mode", std::string("constant")));
      t.g.k = tj.value("k", 0);
      terms.push_back(t);
    }
  } else {
    // shorthand: a single term given at top level
    Term t;
    t.f.kind = kind_from(j.at("family").get<std::string>());
    t.f.center = j.value("center", 0.0);
    t.f.width = j.value("width", 1.0);
    t.f.amplitude = j.value("amplitude", 1.0);
    t.f.gamma = j.value("gamma", 0.75);
    t.f.K = j.value("K", 0.0);
    t.g.kind = mode_from(j.value("mode", std::string("constant")));
    t.g.k = j.value("k", 0);
    terms.push_back(t);
  }
  std::string name = j.value("name", std::string());
  if (name.empty()) name = terms.size() == 1 ? kind_name(terms[0].f.kind) : "combination";
  return TestFunction(name, std::move(terms));
}

std::pair<double, double> map_A(const Torus& t, std::size_t site, double K) {
  int x[3] = {0, 0, 0};
  t.coords(site, x);
  const int x1 = x[0] < t.N / 2 ? x[0] : x[0] - t.N;
  const double a = static_cast<double>(x1) * std::sqrt(K) / t.N;
  const double b = t.d > 1 ? static_cast<double>(x[1]) / t.N : 0.0;
  return {a, b};
}

double cell_average(const TestFunction& F, const Torus& t, std::size_t site, double K) {
  const auto [a, b] = map_A(t, site, K);
  const double hn = std::sqrt(K) / t.N;
  const double ht = 1.0 / t.N;
  double s = 0.0;
  for (const auto& term : F.terms()) {
    const double fa = gauss5([&](double x) { return term.f.value(x); }, a - 0.5 * hn, a + 0.5 * hn) / hn;
    const double ga = t.d > 1 ? gauss5([&](double y) { return term.g.value(y); }, b - 0.5 * ht, b + 0.5 * ht) / ht
                              : term.g.value(0.0);
    s += term.coeff * fa * ga;
  }
  return s;
}

FieldKernel::FieldKernel(const TestFunction& F, const LatticeProfile& u) : name_(F.name()) {
  const int N = u.N(), d = u.d();
  const double K = u.K();
  if (!(K > 0)) throw ParameterError("FieldKernel: profile carries no K");
  const Torus t(N, d);
  const double P = std::sqrt(K);
  const auto sup = F.support();
  const double tol = 1e-12 * P;
  if (sup.first < -0.25 * P - tol || sup.second > 0.25 * P + tol) {
    std::ostringstream os;
    os << "test function '" << F.name() << "' has support [" << sup.first << ", " << sup.second
       << "] outside [-sqrt(K)/4, sqrt(K)/4] = [" << -0.25 * P << ", " << 0.25 * P << "]";
    throw SupportError(os.str());
  }
  const double h = P / N;
  const int lo = static_cast<int>(std::floor(sup.first / h - 0.5)) - 1;
  const int hi = static_cast<int>(std::ceil(sup.second / h + 0.5)) + 1;
  const int rows = d > 1 ? N : 1;
  for (int x1 = lo; x1 <= hi; ++x1) {
    for (int r = 0; r < rows; ++r) {
      int x[3] = {x1, r, 0};
      const std::size_t site = t.index(x);
      const double w = cell_average(F, t, site, K);
      if (w == 0.0) continue;
      w_.emplace_back(static_cast<std::uint32_t>(site), w);
      const double rho = u.at_site(site);
      offset_ += w * rho;
      variance_sum_ += w * w * chi(rho);
    }
  }
  scale_ = 1.0 / std::sqrt(std::pow(static_cast<double>(N), d) * P);
}

double FieldKernel::evaluate(const Configuration& c) const {
  double s = 0.0;
  for (const auto& [site, w] : w_) {
    if (c.occupied(site)) s += w;
  }
  return scale_ * (s - offset_);
}

double FieldKernel::exact_variance() const { return scale_ * scale_ * variance_sum_; }

double fluctuation_field(const Configuration& c, const LatticeProfile& u, const TestFunction& F) {
  return FieldKernel(F, u).evaluate(c);
}

double exact_covariance(const FieldKernel& a, const FieldKernel& b, const LatticeProfile& u) {
  std::map<std::uint32_t, double> wb(b.weights().begin(), b.weights().end());
  double s = 0.0;
  for (const auto& [site, w] : a.weights()) {
    const auto it = wb.find(site);
    if (it == wb.end()) continue;
    const double r = u.at_site(site);
    s += w * it->second * r * (1.0 - r);
  }
  return a.scale() * b.scale() * s;
}

RiemannSums riemann_sums(const TestFunction& F, int N, int d, double K) {
  const Torus t(N, d);
  const double P = std::sqrt(K);
  const auto sup = F.support();
  const double h = P / N;
  const int lo = static_cast<int>(std::floor(sup.first / h)) - 2;
  const int hi = static_cast<int>(std::ceil(sup.second / h)) + 2;
  const int rows = d > 1 ? N : 1;
  RiemannSums r;
  const double cell = P / std::pow(static_cast<double>(N), d);
  for (int x1 = lo; x1 <= hi; ++x1) {
    for (int row = 0; row < rows; ++row) {
      int x[3] = {x1, row, 0};
      int xn[3] = {x1 + 1, row, 0};
      int xt[3] = {x1, row + 1, 0};
      const double f = cell_average(F, t, t.index(x), K);
      const double fn = cell_average(F, t, t.index(xn), K);
      r.value_sq += cell * f * f;
      r.normal_gradient_sq += cell * (fn - f) * (fn - f) / (h * h);
      if (d > 1) {
        const double ft = cell_average(F, t, t.index(xt), K);
        r.transverse_gradient_sq += cell * (ft - f) * (ft - f) * N * N;
      }
    }
  }
  return r;
}

DensityProfileReport mean_density_profile(const std::vector<const Configuration*>& snaps,
                                          const LatticeProfile& u) {
  if (snaps.size() < 2) throw ParameterError("mean_density_profile: need at least 2 replicas");
  const int N = u.N();
  const int d = u.d();
  const std::size_t rows = d > 1 ? static_cast<std::size_t>(N) : 1;
  DensityProfileReport r;
  r.mean.assign(static_cast<std::size_t>(N), 0.0);
  for (const auto* c : snaps) {
    for (std::size_t s = 0; s < c->sites(); ++s) r.mean[s % static_cast<std::size_t>(N)] += c->eta(s);
  }
  const double M = static_cast<double>(snaps.size()) * static_cast<double>(rows);
  std::size_t inside = 0;
  r.deviation.resize(r.mean.size());
  r.band.resize(r.mean.size());
  for (std::size_t i = 0; i < r.mean.size(); ++i) {
    r.mean[i] /= M;
    r.deviation[i] = r.mean[i] - u.line()[i];
    r.band[i] = 3.0 * std::sqrt(chi(u.line()[i]) / M);
    r.max_deviation = std::max(r.max_deviation, std::abs(r.deviation[i]));
    if (std::abs(r.deviation[i]) <= r.band[i]) ++inside;
  }
  r.fraction_within = static_cast<double>(inside) / static_cast<double>(r.mean.size());
  // closest downward crossing of 1/2 to x1 = 0, by linear interpolation
  double best = std::numeric_limits<double>::infinity();
  for (int x1 = -N / 2; x1 < N / 2; ++x1) {
    const double a = r.mean[static_cast<std::size_t>(((x1 % N) + N) % N)];
    const double b = r.mean[static_cast<std::size_t>((((x1 + 1) % N) + N) % N)];
    if ((a - 0.5) * (b - 0.5) <= 0 && a != b) {
      const double pos = x1 + (a - 0.5) / (a - b);
      if (std::abs(pos) < std::abs(best)) best = pos;
    }
  }
  r.interface_position = std::isfinite(best) ? best * std::sqrt(u.K()) / N : std::numeric_limits<double>::quiet_NaN();
  return r;
}

}  // namespace gk
