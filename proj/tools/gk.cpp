// gk: command-line front end for the simulator, field analysis, identity
// suite, spectral tables and covariance reports.

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "gk/ensemble.hpp"
#include "gk/errors.hpp"
#include "gk/harness.hpp"
#include "gk/profile.hpp"
#include "gk/spectral.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Common {
  double gamma = 0.75;
  double K = 64.0;
  int N = 512;
  int d = 1;
  std::size_t grid = 8192;
  double t_end = 0.5;
  std::vector<double> snapshots;
  std::size_t replicas = 4;
  std::uint64_t seed = 1;
  std::uint64_t budget = 0;
  int threads = 0;
  std::string out = "run";
  std::string config;
};

// Values present in the config file replace the flags.
void apply_config(Common& c) {
  if (c.config.empty()) return;
  const auto cfg = gk::ExperimentConfig::load(c.config);
  c.gamma = cfg.gamma;
  c.K = cfg.K;
  c.N = cfg.N;
  c.d = cfg.d;
  c.grid = cfg.profile_grid;
  if (!cfg.times.empty()) {
    c.snapshots = cfg.times;
    c.t_end = cfg.times.back();
  }
  c.replicas = cfg.replicas;
  c.seed = cfg.seed;
  c.budget = cfg.event_budget;
  c.threads = cfg.threads;
  if (!cfg.output_dir.empty()) c.out = cfg.output_dir;
}

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

int cmd_simulate(Common c) {
  apply_config(c);
  if (c.snapshots.empty()) c.snapshots = {c.t_end};
  std::sort(c.snapshots.begin(), c.snapshots.end());
  const auto pot = gk::PotentialParams::from_gamma(c.gamma);
  const auto grid = gk::solve_rho_K(pot, c.K, c.grid);
  gk::EnsembleSpec spec;
  spec.N = c.N;
  spec.d = c.d;
  spec.K = c.K;
  spec.pot = pot;
  spec.profile = gk::discrete_profile(grid, c.N, c.d);
  spec.times = c.snapshots;
  spec.replicas = c.replicas;
  spec.master_seed = c.seed;
  spec.event_budget = c.budget;
  spec.keep_snapshots = true;
  const auto res = gk::run_ensemble(spec, {}, c.threads);

  const fs::path dir = gk::resolve_output_dir(c.out);
  fs::create_directories(dir);
  json man;
  man["gamma"] = c.gamma;
  man["K"] = c.K;
  man["N"] = c.N;
  man["d"] = c.d;
  man["profile_grid"] = c.grid;
  man["seed"] = c.seed;
  man["replicas"] = c.replicas;
  man["times"] = c.snapshots;
  man["dropped"] = res.dropped;
  man["events"] = res.events;
  man["seconds"] = res.seconds;
  man["events_per_second"] = res.seconds > 0 ? static_cast<double>(res.events) / res.seconds : 0.0;
  man["files"] = json::array();
  for (std::size_t r = 0; r < res.replicas.size(); ++r) {
    const auto& rep = res.replicas[r];
    if (rep.dropped) continue;
    for (std::size_t i = 0; i < rep.snapshots.size(); ++i) {
      std::ostringstream name;
      name << "replica_" << std::setw(5) << std::setfill('0') << r << "_t" << i << ".bin";
      gk::SnapshotHeader h;
      h.d = static_cast<std::uint32_t>(c.d);
      h.N = static_cast<std::uint64_t>(c.N);
      h.K = c.K;
      h.gamma = c.gamma;
      h.time = c.snapshots[i];
      h.seed = gk::replica_seed(c.seed, r);
      gk::write_snapshot((dir / name.str()).string(), rep.snapshots[i], h);
      man["files"].push_back({{"replica", r}, {"t", c.snapshots[i]}, {"path", name.str()}});
    }
  }
  std::ofstream(dir / "manifest.json") << man.dump(2) << '\n';
  std::cout << "wrote " << man["files"].size() << " snapshots to " << dir.string() << " (" << res.dropped
            << " replicas dropped, " << man["events_per_second"].get<double>() << " events/s)\n";
  return res.dropped * 20 > c.replicas ? 1 : 0;
}

int cmd_analyze(const std::string& manifest, const std::string& functions, const std::string& out_csv) {
  std::ifstream mi(manifest);
  if (!mi) throw gk::ParameterError("cannot open manifest " + manifest);
  const json man = json::parse(mi);
  std::ifstream fi(functions);
  if (!fi) throw gk::ParameterError("cannot open test-function file " + functions);
  const json fj = json::parse(fi);
  std::vector<gk::TestFunction> fns;
  if (fj.is_array()) {
    for (const auto& f : fj) fns.push_back(gk::TestFunction::from_json(f));
  } else {
    fns.push_back(gk::TestFunction::from_json(fj));
  }
  const auto pot = gk::PotentialParams::from_gamma(man.at("gamma").get<double>());
  const double K = man.at("K").get<double>();
  const auto grid = gk::solve_rho_K(pot, K, man.value("profile_grid", std::size_t{8192}));
  const auto u = gk::discrete_profile(grid, man.at("N").get<int>(), man.at("d").get<int>());
  std::vector<gk::FieldKernel> kernels;
  for (const auto& f : fns) kernels.emplace_back(f, u);

  const fs::path base = fs::path(manifest).parent_path();
  std::vector<gk::Configuration> snaps;
  std::vector<std::pair<std::size_t, double>> labels;
  for (const auto& f : man.at("files")) {
    snaps.push_back(gk::read_snapshot((base / f.at("path").get<std::string>()).string()));
    labels.emplace_back(f.at("replica").get<std::size_t>(), f.at("t").get<double>());
  }
  std::vector<const gk::Configuration*> ptrs;
  for (const auto& s : snaps) ptrs.push_back(&s);
  const auto vals = gk::evaluate_fields(ptrs, kernels);

  const std::string path = gk::resolve_output_dir(out_csv);
  if (fs::path(path).has_parent_path()) fs::create_directories(fs::path(path).parent_path());
  std::ofstream out(path);
  out << "replica,t,F,value\n";
  for (std::size_t s = 0; s < snaps.size(); ++s) {
    for (std::size_t j = 0; j < kernels.size(); ++j) {
      out << labels[s].first << ',' << num(labels[s].second) << ',' << fns[j].name() << ','
          << num(vals[s * kernels.size() + j]) << '\n';
    }
  }
  std::cout << "wrote " << snaps.size() * kernels.size() << " field values to " << path << "\n";
  return 0;
}

int cmd_verify(const std::string& out) {
  const auto checks = gk::identity_suite();
  const json j = gk::suite_json(checks);
  for (const auto& c : checks) {
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << " residual=" << c.residual << " tol=" << c.tolerance
              << "\n";
  }
  if (!out.empty()) {
    const std::string path = gk::resolve_output_dir(out);
    if (fs::path(path).has_parent_path()) fs::create_directories(fs::path(path).parent_path());
    std::ofstream(path) << j.dump(2) << '\n';
  }
  return j["pass"].get<bool>() ? 0 : 1;
}

int cmd_spectrum(Common c, std::size_t sl_grid) {
  apply_config(c);
  const auto pot = gk::PotentialParams::from_gamma(c.gamma);
  const auto g = gk::solve_rho_K(pot, c.K, std::max<std::size_t>(c.grid, 2 * sl_grid));
  const auto sl = gk::assemble_sl(g, pot, sl_grid);
  const auto gs = gk::ground_state_report(sl, g);
  const fs::path dir = gk::resolve_output_dir(c.out);
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "eigenvalues.csv");
    out << "k,lambda,K_lambda\n";
    for (std::size_t k = 0; k < sl.eigenvalues.size(); ++k) {
      out << k << ',' << num(sl.eigenvalues[k]) << ',' << num(c.K * sl.eigenvalues[k]) << '\n';
    }
  }
  {
    const gk::TorusInterfaceShape eK(gk::InterfaceShape(gk::StandingWave(pot)), c.K);
    std::vector<double> e(sl.size()), dr(sl.size());
    for (std::size_t i = 0; i < sl.size(); ++i) {
      e[i] = eK(sl.theta[i]);
      dr[i] = g.derivative(sl.theta[i]);
    }
    const double ne = sl.norm(e), nd = sl.norm(dr);
    const auto p0 = sl.eigenvector(0), p1 = sl.eigenvector(1);
    const double sgn = sl.inner(p0, e) < 0 ? -1.0 : 1.0;
    std::ofstream out(dir / "ground_state.csv");
    out << "theta,psi0,psi1,e_K,drho_normalized\n";
    for (std::size_t i = 0; i < sl.size(); ++i) {
      out << num(sl.theta[i]) << ',' << num(sgn * p0[i]) << ',' << num(p1[i]) << ',' << num(e[i] / ne) << ','
          << num(dr[i] / nd) << '\n';
    }
  }
  std::cout << "lambda0=" << gs.lambda0 << " lambda1=" << gs.lambda1 << " gap=" << gs.gap
            << " |psi0-e_K|=" << gs.distance_psi0 << " localized=" << gs.distance_localized
            << " |A drho|/|drho|=" << gs.derivative_residual << "\n";
  return 0;
}

int cmd_report(const std::string& config, const std::string& out, int threads) {
  auto cfg = gk::ExperimentConfig::load(config);
  if (!out.empty()) cfg.output_dir = out;
  if (threads > 0) cfg.threads = threads;
  const auto r = gk::run_experiment(cfg);
  gk::persist(cfg, r);
  const auto& rep = r.report;
  bool has_initial = false;
  for (double t : cfg.times) has_initial = has_initial || t == 0.0;
  const bool initial_ok = !has_initial || rep.initial_pass_fraction() >= 0.95;
  const bool mean_ok = rep.mean_pass_fraction() >= 0.95;
  std::cout << "replicas=" << rep.replicas << " dropped=" << rep.dropped
            << " initial_pass=" << rep.initial_pass_fraction() << " mean_pass=" << rep.mean_pass_fraction()
            << " output=" << gk::resolve_output_dir(cfg.output_dir) << "\n";
  return (initial_ok && mean_ok && !rep.drop_flag) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gk: Glauber + Kawasaki interface fluctuation laboratory"};
  app.require_subcommand(1);

  Common sim;
  auto* s = app.add_subcommand("simulate", "run replicas from nu^N and write snapshots");
  s->add_option("--gamma", sim.gamma, "Glauber parameter in (1/2, 1]");
  s->add_option("--K", sim.K, "reaction speed");
  s->add_option("--N", sim.N, "lattice side");
  s->add_option("--d", sim.d, "dimension (1 or 2)");
  s->add_option("--t-end", sim.t_end, "final macroscopic time");
  s->add_option("--snapshots", sim.snapshots, "snapshot times")->delimiter(',');
  s->add_option("--replicas", sim.replicas, "number of replicas");
  s->add_option("--seed", sim.seed, "master seed");
  s->add_option("--budget", sim.budget, "event budget per replica (0 = none)");
  s->add_option("--threads", sim.threads, "worker threads (0 = default)");
  s->add_option("--grid", sim.grid, "profile grid points");
  s->add_option("--out", sim.out, "output directory");
  s->add_option("--config", sim.config, "YAML config; its values replace the flags");

  std::string manifest, functions, analyze_out = "fields.csv";
  auto* a = app.add_subcommand("analyze", "evaluate fluctuation fields on stored snapshots");
  a->add_option("--manifest", manifest, "manifest.json written by simulate")->required();
  a->add_option("--functions", functions, "test-function JSON file")->required();
  a->add_option("--out", analyze_out, "output CSV");

  std::string verify_out;
  auto* v = app.add_subcommand("verify", "run the exact-identity suite");
  v->add_option("--out", verify_out, "JSON report path");

  Common spec;
  spec.out = "spectrum";
  std::size_t sl_grid = 2048;
  auto* sp = app.add_subcommand("spectrum", "Sturm-Liouville eigenvalues and ground state");
  sp->add_option("--gamma", spec.gamma, "Glauber parameter");
  sp->add_option("--K", spec.K, "reaction speed");
  sp->add_option("--grid", sl_grid, "operator grid points");
  sp->add_option("--out", spec.out, "output directory");
  sp->add_option("--config", spec.config, "YAML config; its values replace the flags");

  std::string report_cfg, report_out;
  int report_threads = 0;
  auto* r = app.add_subcommand("report", "ensemble covariance report against the limit theory");
  r->add_option("--config", report_cfg, "YAML experiment config")->required();
  r->add_option("--out", report_out, "output directory (overrides the config)");
  r->add_option("--threads", report_threads, "worker threads");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*s) return cmd_simulate(sim);
    if (*a) return cmd_analyze(manifest, functions, analyze_out);
    if (*v) return cmd_verify(verify_out);
    if (*sp) return cmd_spectrum(spec, sl_grid);
    if (*r) return cmd_report(report_cfg, report_out, report_threads);
  } catch (const std::exception& e) {
    std::cerr << "gk: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
