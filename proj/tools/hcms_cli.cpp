// Command-line driver for the multiscale H(curl) solver.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hcms/config.hpp"
#include "hcms/error.hpp"
#include "hcms/experiment.hpp"

namespace fs = std::filesystem;
using namespace hcms;

namespace {

struct Options {
  std::string config_file;
  std::vector<std::string> sets;
  std::map<std::string, std::string> flags;
  bool compare = false;
};

RunConfig resolve(const Options& opt) {
  RunConfig cfg = opt.config_file.empty() ? RunConfig{} : load_config(opt.config_file);
  for (const auto& [key, value] : opt.flags)
    if (!value.empty()) cfg.set(key, value);
  for (const auto& kv : opt.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::Parse, "--set expects key=value, got '" + kv + "'");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  cfg.validate();
  return cfg;
}

fs::path out_dir(const RunConfig& cfg) {
  fs::path dir(cfg.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create " + dir.string() + ": " + ec.message());
  return dir;
}

void write_vector(const Vector& v, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot open " + path.string() + " for writing");
  char buf[32];
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g\n", v[k]);
    out << buf;
  }
}

void summarize(const History& h, const std::string& label) {
  const auto& last = h.rows.back();
  std::printf("%s: %zu rows, final DOF %d, e1 %.6e, e2 %.6e (%s)\n", label.c_str(), h.rows.size(), last.dof, last.e1,
              last.e2, h.stop_reason.c_str());
}

int cmd_print_config(const RunConfig& cfg) {
  print_config(cfg, std::cout);
  return 0;
}

int cmd_solve_fine(const RunConfig& cfg) {
  const fs::path dir = out_dir(cfg);
  const Problem prob = setup_problem(cfg);
  SolveReport rep;
  const Vector u = solve_fine(prob, &rep);
  write_raster(prob.kappa, dir / "kappa.txt");
  write_raster(prob.a, dir / "a.txt");
  write_vector(u, dir / "u_fine.txt");
  if (cfg.dump) write_triplets(prob.A, dir / "A.txt");
  std::printf("fine solve: %d edges, %s, %d steps, relative residual %.3e, energy norm %.6e\n",
              prob.fine.num_edges(), rep.method.c_str(), rep.iterations, rep.relative_residual,
              weighted_norms(prob.fine, u, prob.a, prob.b).energy);
  return 0;
}

int cmd_snapshot_error(const RunConfig& cfg) {
  const fs::path dir = out_dir(cfg);
  const Pipeline pipe(cfg);
  const Vector u_h = solve_fine(pipe.problem);
  const Vector u_snap = pipe.snapshot_solution();
  const ErrorMetrics m = compute_metrics(pipe.problem.fine, u_h, u_snap, u_snap, pipe.problem.a, pipe.problem.b);
  std::ofstream out(dir / "snapshot_error.csv");
  if (!out) throw Error(ErrorKind::Io, "cannot write snapshot_error.csv");
  char buf[160];
  std::snprintf(buf, sizeof buf, "n,N,p,snapshot_dim,e1_tilde\n%d,%d,%.17g,%d,%.17g\n", cfg.n, cfg.N, cfg.p,
                pipe.space.dim(), m.e1_tilde);
  out << buf;
  write_eigenvalue_report(*pipe.spectral, pipe.space, dir / "eigenvalues.csv");
  if (cfg.dump) {
    write_triplets(pipe.space.basis, dir / "snapshot_basis.txt");
    write_vector(u_snap, dir / "u_snap.txt");
  }
  std::printf("snapshot space: dim %d, e1_tilde %.6e\n", pipe.space.dim(), m.e1_tilde);
  return 0;
}

void dump_space(const Pipeline& pipe, const History& h, const fs::path& dir, const std::string& stem) {
  if (!pipe.config.dump || h.rows.empty() || h.rows.back().solution.size() == 0) return;
  write_vector(pipe.space.basis * h.rows.back().solution, dir / (stem + "_u_ms.txt"));
}

int cmd_offline(const RunConfig& cfg, bool compare) {
  const fs::path dir = out_dir(cfg);
  const Pipeline pipe(cfg);
  write_eigenvalue_report(*pipe.spectral, pipe.space, dir / "eigenvalues.csv");
  if (compare) {
    const AdaptiveComparison cmp = adaptive_vs_uniform(pipe);
    write_history_csv(cmp.adaptive, dir / "history_adaptive.csv");
    write_history_csv(cmp.uniform, dir / "history_uniform.csv");
    summarize(cmp.adaptive, "adaptive");
    summarize(cmp.uniform, "uniform");
    std::printf("matched DOF %d: adaptive e1 %.6e, uniform e1 %.6e\n", cmp.budget, cmp.adaptive_e1,
                cmp.uniform_e1);
    return 0;
  }
  const History h = pipe.solver().run_offline();
  write_history_csv(h, dir / "history_offline.csv");
  dump_space(pipe, h, dir, "offline");
  summarize(h, "offline");
  return 0;
}

int cmd_uniform(const RunConfig& cfg) {
  const fs::path dir = out_dir(cfg);
  const Pipeline pipe(cfg);
  const History h = pipe.solver().run_uniform();
  write_history_csv(h, dir / "history_uniform.csv");
  dump_space(pipe, h, dir, "uniform");
  summarize(h, "uniform");
  return 0;
}

int cmd_online(const RunConfig& cfg) {
  const fs::path dir = out_dir(cfg);
  const Pipeline pipe(cfg);
  const History h = pipe.solver().run_online();
  write_history_csv(h, dir / "history_online.csv");
  dump_space(pipe, h, dir, "online");
  summarize(h, "online");
  return 0;
}

int cmd_offline_online(const RunConfig& cfg) {
  const fs::path dir = out_dir(cfg);
  const Pipeline pipe(cfg);
  const History h = offline_online_experiment(pipe);
  write_history_csv(h, dir / "history_offline_online.csv");
  dump_space(pipe, h, dir, "offline_online");
  summarize(h, "offline-online");
  if (h.switch_row >= 0)
    std::printf("switched to online after iteration %d\n", h.rows[static_cast<std::size_t>(h.switch_row) - 1].iteration);
  else
    std::printf("no switch to the online stage\n");
  return 0;
}

int cmd_convergence(const RunConfig& cfg) {
  const fs::path dir = out_dir(cfg);
  const ConvergenceTable t = convergence_study(cfg);
  write_convergence_csv(t, dir / "convergence.csv");
  std::printf("%8s", "H");
  for (double p : t.p) std::printf("  p=%-10g", p);
  std::printf("\n");
  for (std::size_t r = 0; r < t.coarse.size(); ++r) {
    std::printf("%8.5f", 1.0 / t.coarse[r]);
    for (double e : t.e1_tilde[r]) std::printf("  %-12.5e", e);
    std::printf("\n");
  }
  return 0;
}

int exit_code(ErrorKind kind) { return 10 + static_cast<int>(kind); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive multiscale solver for curl(a curl u) + b u = f on the unit square"};
  app.require_subcommand(1);

  struct Command {
    const char* name;
    const char* help;
    std::function<int(const RunConfig&, const Options&)> run;
  };
  const std::vector<Command> commands{
      {"solve-fine", "Reference fine-grid solve", [](const RunConfig& c, const Options&) { return cmd_solve_fine(c); }},
      {"snapshot-error", "Snapshot space error against the fine solution",
       [](const RunConfig& c, const Options&) { return cmd_snapshot_error(c); }},
      {"offline-adaptive", "Offline adaptive enrichment",
       [](const RunConfig& c, const Options& o) { return cmd_offline(c, o.compare); }},
      {"uniform", "Uniform offline enrichment", [](const RunConfig& c, const Options&) { return cmd_uniform(c); }},
      {"online", "Online residual-driven enrichment", [](const RunConfig& c, const Options&) { return cmd_online(c); }},
      {"offline-online", "Offline enrichment switching to online",
       [](const RunConfig& c, const Options&) { return cmd_offline_online(c); }},
      {"convergence-study", "Snapshot error over coarse sizes and contrasts",
       [](const RunConfig& c, const Options&) { return cmd_convergence(c); }},
      {"print-config", "Print the effective configuration",
       [](const RunConfig& c, const Options&) { return cmd_print_config(c); }},
  };

  Options opt;
  std::map<const CLI::App*, const Command*> lookup;
  for (const auto& cmd : commands) {
    CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
    sub->add_option("-c,--config", opt.config_file, "key = value configuration file");
    sub->add_option("--set", opt.sets, "override a key (key=value), repeatable");
    for (const auto& key : RunConfig::keys())
      sub->add_option("--" + key, opt.flags[key], "see print-config");
    if (std::string(cmd.name) == "offline-adaptive")
      sub->add_flag("--compare", opt.compare, "also run uniform enrichment to the same DOF");
    lookup[sub] = &cmd;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    const RunConfig cfg = resolve(opt);
    for (const auto& [sub, cmd] : lookup)
      if (sub->parsed()) return cmd->run(cfg, opt);
  } catch (const Error& e) {
    std::cerr << "error[" << to_string(e.kind()) << "]: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error[internal]: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
