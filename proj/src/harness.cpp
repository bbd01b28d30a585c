#include "gk/harness.hpp"

#include <yaml-cpp/yaml.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <numbers>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "gk/errors.hpp"
#include "gk/flows.hpp"
#include "gk/generator.hpp"
#include "gk/identities.hpp"
#include "gk/profile.hpp"
#include "gk/rng.hpp"
#include "gk/spectral.hpp"
#include "gk/stats.hpp"

namespace gk {

namespace {

// A present key must convert; the fallback applies only when the key is missing.
template <class T>
T read(const YAML::Node& n, const char* key, const T& fallback) {
  const YAML::Node v = n[key];
  return v ? v.as<T>() : fallback;
}

// JSON values to YAML nodes and back, so that test functions share one schema.
YAML::Node to_yaml_node(const nlohmann::json& j) {
  YAML::Node n;
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) n[it.key()] = to_yaml_node(it.value());
  } else if (j.is_array()) {
    for (const auto& v : j) n.push_back(to_yaml_node(v));
  } else if (j.is_string()) {
    n = j.get<std::string>();
  } else if (j.is_number_integer()) {
    n = j.get<long long>();
  } else if (j.is_number()) {
    n = j.get<double>();
  } else if (j.is_boolean()) {
    n = j.get<bool>();
  }
  return n;
}

nlohmann::json from_yaml_node(const YAML::Node& n) {
  if (n.IsMap()) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& kv : n) j[kv.first.as<std::string>()] = from_yaml_node(kv.second);
    return j;
  }
  if (n.IsSequence()) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& v : n) j.push_back(from_yaml_node(v));
    return j;
  }
  if (n.IsScalar()) {
    const std::string s = n.Scalar();
    long long i = 0;
    double d = 0.0;
    if (YAML::convert<long long>::decode(n, i) && s.find_first_of(".eE") == std::string::npos) return i;
    if (YAML::convert<double>::decode(n, d)) return d;
    if (s == "true" || s == "false") return s == "true";
    return s;
  }
  return nullptr;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

void ExperimentConfig::validate() const {
  if (schema_version != kSchemaVersion) throw ParameterError("config: unsupported schema version");
  PotentialParams::from_gamma(gamma);
  if (d != 1 && d != 2) throw ParameterError("config: d must be 1 or 2");
  if (N < 8) throw ParameterError("config: N must be at least 8");
  if (replicas < 2) throw ParameterError("config: at least 2 replicas");
  if (times.empty()) throw ParameterError("config: no observation times");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < 0 || (i > 0 && times[i] < times[i - 1])) throw ParameterError("config: times must be sorted and >= 0");
  }
  if (functions.empty()) throw ParameterError("config: no test functions");
}

std::string ExperimentConfig::to_yaml() const {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  out << YAML::Key << "schema_version" << YAML::Value << schema_version;
  out << YAML::Key << "name" << YAML::Value << name;
  out << YAML::Key << "model" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "gamma" << YAML::Value << gamma;
  out << YAML::Key << "N" << YAML::Value << N;
  out << YAML::Key << "d" << YAML::Value << d;
  out << YAML::Key << "K" << YAML::Value << K;
  out << YAML::Key << "profile_grid" << YAML::Value << profile_grid;
  out << YAML::EndMap;
  out << YAML::Key << "run" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "times" << YAML::Value << YAML::Flow << times;
  out << YAML::Key << "replicas" << YAML::Value << replicas;
  out << YAML::Key << "seed" << YAML::Value << seed;
  out << YAML::Key << "event_budget" << YAML::Value << event_budget;
  out << YAML::Key << "threads" << YAML::Value << threads;
  out << YAML::Key << "output_dir" << YAML::Value << output_dir;
  out << YAML::EndMap;
  YAML::Node fs(YAML::NodeType::Sequence);
  for (const auto& f : functions) fs.push_back(to_yaml_node(f.to_json()));
  out << YAML::Key << "functions" << YAML::Value << fs;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

ExperimentConfig ExperimentConfig::from_yaml(const std::string& text) {
  ExperimentConfig c;
  try {
    const YAML::Node root = YAML::Load(text);
    c.schema_version = read<int>(root, "schema_version", kSchemaVersion);
    c.name = read<std::string>(root, "name", c.name);
    if (const auto m = root["model"]) {
      c.gamma = read<double>(m, "gamma", c.gamma);
      c.N = read<int>(m, "N", c.N);
      c.d = read<int>(m, "d", c.d);
      c.K = read<double>(m, "K", c.K);
      c.profile_grid = read<std::size_t>(m, "profile_grid", c.profile_grid);
    }
    if (const auto r = root["run"]) {
      if (r["times"]) c.times = r["times"].as<std::vector<double>>();
      c.replicas = read<std::size_t>(r, "replicas", c.replicas);
      c.seed = read<std::uint64_t>(r, "seed", c.seed);
      c.event_budget = read<std::uint64_t>(r, "event_budget", c.event_budget);
      c.threads = read<int>(r, "threads", c.threads);
      c.output_dir = read<std::string>(r, "output_dir", c.output_dir);
    }
    if (const auto fs = root["functions"]) {
      for (const auto& f : fs) c.functions.push_back(TestFunction::from_json(from_yaml_node(f)));
    }
  } catch (const YAML::Exception& e) {
    throw ParameterError(std::string("config: ") + e.what());
  }
  if (c.schema_version != kSchemaVersion) throw ParameterError("config: unsupported schema version");
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_yaml(ss.str());
}

void ExperimentConfig::save(const std::string& path) const {
  std::ofstream out(path);
  out << to_yaml();
}

std::string resolve_output_dir(const std::string& output_dir) {
  std::filesystem::path p(output_dir.empty() ? "." : output_dir);
  if (p.is_relative()) {
    if (const char* root = std::getenv("GK_OUTPUT_ROOT"); root && *root) p = std::filesystem::path(root) / p;
  }
  return p.string();
}

double CovarianceReport::initial_pass_fraction() const {
  std::size_t n = 0, ok = 0;
  for (const auto& e : entries) {
    if (e.s == 0.0 && e.t == 0.0 && e.F == e.G) {
      ++n;
      if (std::abs(e.z) <= 3.0) ++ok;
    }
  }
  return n ? static_cast<double>(ok) / static_cast<double>(n) : 0.0;
}

double CovarianceReport::mean_pass_fraction() const {
  std::size_t ok = 0;
  for (const auto& m : means) {
    if (std::abs(m.z) <= 3.0) ++ok;
  }
  return means.empty() ? 0.0 : static_cast<double>(ok) / static_cast<double>(means.size());
}

nlohmann::json CovarianceReport::to_json(bool with_timestamp) const {
  nlohmann::json j;
  j["name"] = name;
  j["replicas"] = replicas;
  j["dropped"] = dropped;
  j["drop_flag"] = drop_flag;
  j["varpi"] = varpi;
  j["seconds"] = seconds;
  j["events_per_second"] = events_per_second;
  j["initial_pass_fraction"] = initial_pass_fraction();
  j["mean_pass_fraction"] = mean_pass_fraction();
  j["entries"] = nlohmann::json::array();
  for (const auto& e : entries) {
    j["entries"].push_back({{"F", e.F},
                            {"G", e.G},
                            {"s", e.s},
                            {"t", e.t},
                            {"empirical", e.empirical},
                            {"se", e.se},
                            {"theory", e.theory},
                            {"theory_kind", e.theory_kind},
                            {"z", e.z}});
  }
  j["means"] = nlohmann::json::array();
  for (const auto& m : means) {
    j["means"].push_back({{"F", m.F}, {"t", m.t}, {"mean", m.mean}, {"se", m.se}, {"z", m.z}});
  }
  if (with_timestamp) {
    const std::time_t now = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    j["timestamp"] = buf;
  }
  return j;
}

void CovarianceReport::write_csv(const std::string& path) const {
  std::ofstream out(path);
  out << "F,G,s,t,empirical,se,theory,theory_kind,z\n";
  for (const auto& e : entries) {
    out << e.F << ',' << e.G << ',' << fmt(e.s) << ',' << fmt(e.t) << ',' << fmt(e.empirical) << ',' << fmt(e.se)
        << ',' << fmt(e.theory) << ',' << e.theory_kind << ',' << fmt(e.z) << '\n';
  }
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto pot = PotentialParams::from_gamma(cfg.gamma);
  const auto grid = solve_rho_K(pot, cfg.K, cfg.profile_grid);
  ExperimentResult r;
  r.profile = discrete_profile(grid, cfg.N, cfg.d);
  for (const auto& f : cfg.functions) r.kernels.emplace_back(f, r.profile);

  EnsembleSpec spec;
  spec.N = cfg.N;
  spec.d = cfg.d;
  spec.K = cfg.K;
  spec.pot = pot;
  spec.profile = r.profile;
  spec.times = cfg.times;
  spec.replicas = cfg.replicas;
  spec.master_seed = cfg.seed;
  spec.event_budget = cfg.event_budget;
  r.ensemble = run_ensemble(spec, r.kernels, cfg.threads);

  auto& rep = r.report;
  rep.name = cfg.name;
  rep.replicas = cfg.replicas;
  rep.dropped = r.ensemble.dropped;
  rep.drop_flag = static_cast<double>(rep.dropped) > 0.05 * static_cast<double>(cfg.replicas);
  rep.seconds = r.ensemble.seconds;
  rep.events_per_second = r.ensemble.seconds > 0 ? static_cast<double>(r.ensemble.events) / r.ensemble.seconds : 0.0;
  rep.varpi = varpi(pot).value;
  if (cfg.replicas - rep.dropped < 3) throw ParameterError("run_experiment: fewer than 3 replicas survived");

  const std::size_t T = cfg.times.size(), F = cfg.functions.size();
  for (std::size_t i = 0; i < T; ++i) {
    for (std::size_t a = 0; a < F; ++a) {
      const auto x = r.ensemble.column(i, a);
      MeanEntry m;
      m.F = cfg.functions[a].name();
      m.t = cfg.times[i];
      m.mean = mean(x);
      m.se = std::sqrt(variance(x) / static_cast<double>(x.size()));
      m.z = m.se > 0 ? m.mean / m.se : 0.0;
      rep.means.push_back(m);
    }
  }
  for (std::size_t i = 0; i < T; ++i) {
    for (std::size_t k = i; k < T; ++k) {
      for (std::size_t a = 0; a < F; ++a) {
        for (std::size_t b = (i == k ? a : 0); b < F; ++b) {
          const auto x = r.ensemble.column(i, a);
          const auto y = r.ensemble.column(k, b);
          const auto est = jackknife_covariance(x, y);
          CovarianceEntry e;
          e.F = cfg.functions[a].name();
          e.G = cfg.functions[b].name();
          e.s = cfg.times[i];
          e.t = cfg.times[k];
          e.empirical = est.value;
          e.se = est.se;
          if (e.s == 0.0 && e.t == 0.0) {
            e.theory = exact_covariance(r.kernels[a], r.kernels[b], r.profile);
            e.theory_kind = "product";
          } else {
            e.theory = limit_covariance(cfg.functions[a], cfg.functions[b], e.s, e.t, pot, cfg.d);
            e.theory_kind = "limit";
          }
          e.z = e.se > 0 ? (e.empirical - e.theory) / e.se : 0.0;
          rep.entries.push_back(e);
        }
      }
    }
  }
  return r;
}

void persist(const ExperimentConfig& cfg, const ExperimentResult& r) {
  const std::filesystem::path dir = resolve_output_dir(cfg.output_dir);
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "report.json");
    out << r.report.to_json().dump(2) << '\n';
  }
  r.report.write_csv((dir / "covariance.csv").string());
  {
    std::ofstream out(dir / "fields.csv");
    out << "replica,t,F,value\n";
    for (std::size_t q = 0; q < r.ensemble.replicas.size(); ++q) {
      const auto& rep = r.ensemble.replicas[q];
      if (rep.dropped) continue;
      for (std::size_t i = 0; i < rep.fields.size(); ++i) {
        for (std::size_t j = 0; j < rep.fields[i].size(); ++j) {
          out << q << ',' << fmt(cfg.times[i]) << ',' << cfg.functions[j].name() << ',' << fmt(rep.fields[i][j])
              << '\n';
        }
      }
    }
  }
  cfg.save((dir / "config.yaml").string());
}

ShapeReport normality_and_shape_report(const std::vector<std::vector<double>>& family,
                                       const std::vector<double>& centers, const std::vector<double>& predicted,
                                       std::size_t reference, const std::vector<double>* null_values,
                                       const std::vector<double>* aligned_values) {
  if (family.size() != centers.size() || family.size() != predicted.size() || reference >= family.size()) {
    throw ParameterError("normality_and_shape_report: inconsistent family sizes");
  }
  ShapeReport s;
  s.centers = centers;
  s.predicted = predicted;
  for (const auto& f : family) s.measured.push_back(covariance(f, family[reference]));
  s.correlation = pearson(s.measured, s.predicted);
  const auto ci = correlation_interval(s.correlation, family.size());
  s.ci_lo = ci.lo;
  s.ci_hi = ci.hi;
  s.normality_p = dagostino_k2(family[reference]).p_value;
  if (null_values && aligned_values) s.null_ratio = variance(*null_values) / variance(*aligned_values);
  return s;
}

}  // namespace gk

namespace gk {

namespace {

LatticeProfile two_layer_profile(int N, double K) {
  std::vector<double> v(static_cast<std::size_t>(N));
  for (int x = 0; x < N; ++x) v[static_cast<std::size_t>(x)] = 0.5 + 0.35 * std::cos(2.0 * std::numbers::pi * x / N + 0.3);
  return LatticeProfile(N, 1, K, v);
}

SuiteCheck make_check(std::string name, double residual, double tol) {
  return {std::move(name), residual, tol, residual <= tol};
}

}  // namespace

std::vector<SuiteCheck> identity_suite(std::uint64_t seed) {
  std::vector<SuiteCheck> out;
  const double gamma = 0.75;
  const auto pot = PotentialParams::from_gamma(gamma);

  double adj = 0.0, mat = 0.0, mean_zero = 0.0;
  for (int N : {3, 4, 5}) {
    for (double K : {1.0, 4.0}) {
      for (int kind = 0; kind < 3; ++kind) {
        const Torus t(N, 1);
        const LatticeProfile u = kind == 0   ? LatticeProfile(N, 1, K, std::vector<double>(N, 0.3))
                                 : kind == 1 ? LatticeProfile(N, 1, K, std::vector<double>(N, pot.rho_plus))
                                             : two_layer_profile(N, K);
        const auto bf = brute_force_adjoint(t, u, gamma, K);
        const auto mx = matrix_adjoint_one(t, u, gamma, K);
        const auto terms = adjoint_terms(t, u, gamma, K);
        const auto nu = product_weights(t, u);
        double m = 0.0;
        for (std::size_t s = 0; s < bf.size(); ++s) {
          const auto c = Configuration::from_state_index(t, s);
          adj = std::max(adj, std::abs(adjoint_one(c, terms) - bf[s]));
          mat = std::max(mat, std::abs(mx[s] - bf[s]));
          m += nu(static_cast<Eigen::Index>(s)) * bf[s];
        }
        mean_zero = std::max(mean_zero, std::abs(m));
      }
    }
  }
  out.push_back(make_check("adjoint_one_vs_brute_force", adj, 1e-10));
  out.push_back(make_check("brute_force_vs_generator_matrix", mat, 1e-12));
  out.push_back(make_check("adjoint_mean_zero", mean_zero, 1e-12));

  // cylinder functions on an interface profile
  const auto grid = solve_rho_K(pot, 64.0, 4096);
  const auto u = discrete_profile(grid, 64, 1);
  Rng rng(seed);
  std::vector<CylinderFunction> fs{h0_function(gamma), CylinderFunction::monomial({0, 1}, 3U)};
  {
    std::vector<double> vals(16);
    for (auto& v : vals) v = rng.uniform() * 2.0 - 1.0;
    fs.push_back(CylinderFunction::from_values({-1, 0, 1, 2}, vals));
  }
  double dec = 0.0, xi_gap = 0.0, orth = 0.0;
  for (const auto& f : fs) {
    dec = std::max(dec, decomposition_residual(f, u, gamma));
    for (int x = 0; x < u.N(); x += 3) {
      const auto e = xi_expansion(f, u, x);
      double m0 = 0.0;
      std::vector<double> m1(f.size(), 0.0);
      for (unsigned s = 0; s < (1U << f.size()); ++s) {
        double w = 1.0;
        for (std::size_t i = 0; i < f.size(); ++i) w *= ((s >> i) & 1U) ? e.rho[i] : 1.0 - e.rho[i];
        const double xi = e.xi(s);
        xi_gap = std::max(xi_gap, std::abs(xi - xi_direct(f, u, x, s)));
        m0 += w * xi;
        for (std::size_t i = 0; i < f.size(); ++i) {
          m1[i] += w * xi * (((s >> i) & 1U) - e.rho[i]) / (e.rho[i] * (1.0 - e.rho[i]));
        }
      }
      orth = std::max(orth, std::abs(m0));
      for (double v : m1) orth = std::max(orth, std::abs(v));
    }
  }
  out.push_back(make_check("decomposition_exact", dec, 1e-12));
  out.push_back(make_check("xi_expansion_vs_definition", xi_gap, 1e-12));
  out.push_back(make_check("xi_orthogonality", orth, 1e-12));

  // flows
  bool exact = true;
  for (int d : {1, 2}) {
    for (int ell : {1, 2, 3, 5, 8, 13, 16, 32, 64}) {
      try {
        exact = build_flow(ell, d, true).exact && exact;
      } catch (const ConvergenceError&) {
        exact = false;
      }
    }
  }
  out.push_back(make_check("flow_divergence_exact", exact ? 0.0 : 1.0, 0.0));

  double wsum = 0.0, wflow = 0.0, hind = 0.0;
  for (int d : {1, 2}) {
    const int N = d == 1 ? 40 : 12;
    const Torus t(N, d);
    std::vector<double> v(static_cast<std::size_t>(N));
    for (int x = 0; x < N; ++x) v[static_cast<std::size_t>(x)] = 0.2 + 0.6 * rng.uniform();
    const LatticeProfile up(N, d, 16.0, v);
    const std::vector<Point> A = d == 1 ? std::vector<Point>{{0, 0, 0}, {1, 0, 0}, {3, 0, 0}}
                                        : std::vector<Point>{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
    for (int ell : {1, 2, 4}) {
      const auto flow = build_flow(ell, d, false);
      for (int rep = 0; rep < 3; ++rep) {
        std::vector<double> G(t.sites());
        for (auto& g : G) g = rng.uniform() * 2.0 - 1.0;
        auto c = sample_nu_N(up, rng.bits());
        const auto w = w_decomposition(G, A, c, up, flow);
        const double sc = 1.0 + std::abs(w.W);
        wsum = std::max(wsum, std::abs(w.W - w.W1 - w.W2) / sc);
        wflow = std::max(wflow, std::abs(w.W2 - w.W2_flow) / sc);
        for (int k = 0; k < d; ++k) {
          const std::size_t x = rng.below(t.sites());
          const double h = H_ell(flow, G, A, c, up, k, x);
          auto c2 = c;
          c2.exchange(x, k);
          hind = std::max(hind, std::abs(H_ell(flow, G, A, c2, up, k, x) - h));
        }
      }
    }
  }
  out.push_back(make_check("w_additivity", wsum, 1e-12));
  out.push_back(make_check("w2_summation_by_parts", wflow, 1e-12));
  out.push_back(make_check("h_exchange_independence", hind, 1e-12));

  double seq = 0.0;
  for (int N : {16, 64, 256, 1024}) {
    const auto e1 = ell_sequences(N, 1);
    seq = std::max(seq, std::abs(std::pow(e1.ell, 0.5) * e1.s / (static_cast<double>(N) * N) - 1.0));
    const auto e2 = ell_sequences(N, 2);
    seq = std::max(seq, std::abs(e2.ell * e2.ell * e2.ell * std::log(e2.ell) / (static_cast<double>(N) * N) - 1.0));
  }
  out.push_back(make_check("ell_sequences_defining_equations", seq, 1e-9));
  return out;
}

nlohmann::json suite_json(const std::vector<SuiteCheck>& checks) {
  nlohmann::json j;
  bool all = true;
  j["checks"] = nlohmann::json::array();
  for (const auto& c : checks) {
    j["checks"].push_back({{"name", c.name}, {"residual", c.residual}, {"tolerance", c.tolerance}, {"pass", c.pass}});
    all = all && c.pass;
  }
  j["pass"] = all;
  return j;
}

}  // namespace gk
