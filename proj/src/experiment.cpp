#include "hcms/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "hcms/error.hpp"

namespace hcms {

CellField make_kappa(const RunConfig& config, const FineGrid& fine) {
  if (!config.kappa_file.empty()) return read_raster(config.kappa_file, fine.n());
  ContrastOptions opt;
  opt.pattern = config.pattern;
  opt.seed = config.seed;
  opt.value = config.kappa0;
  opt.density = config.density;
  return generate_contrast_field(fine, opt);
}

Problem setup_problem(const RunConfig& config) {
  config.validate();
  FineGrid fine = build_fine_grid(config.n);
  CoarseGrid coarse = build_coarse_grid(fine, config.N);
  CellField kappa = make_kappa(config, fine);
  CellField a = contrast_power(kappa, config.p);
  CellField b = config.b_file.empty() ? CellField(config.n, config.b) : read_raster(config.b_file, config.n);
  if (b.min() <= 0) throw Error(ErrorKind::Config, "b must be positive everywhere");
  VectorCellField f = example_source(config.example, fine);
  const GlobalMatrices mats = assemble_global(fine, a, b);
  SparseMatrix l2 = assemble_global(fine, a, CellField(config.n, 1.0)).mass;
  Vector F = assemble_load(fine, f);
  SparseMatrix C = curl_factor(fine, a);
  return {std::move(fine), std::move(coarse), std::move(kappa), std::move(a), std::move(b), std::move(f),
          mats.total(), std::move(C), mats.mass, std::move(l2), std::move(F)};
}

Vector solve_fine(const Problem& problem, SolveReport* report) {
  const ReducedSystem sys = apply_essential_bc(problem.A, problem.F, problem.fine);
  return sys.map.expand(solve_spd(sys.A, sys.F, 1e-10, report));
}

Pipeline::Pipeline(const RunConfig& cfg)
    : config(cfg),
      problem(setup_problem(cfg)),
      space(build_snapshot_space(problem.coarse, problem.a, problem.b)),
      snapshot(build_snapshot_problem(space, problem.curl_factor, problem.mass, problem.l2_mass, problem.F)),
      spectral(std::make_shared<const SpectralData>(compute_spectral(problem.coarse, space, problem.a, problem.b))) {}

AdaptiveSolver Pipeline::solver(const AdaptiveConfig& adaptive) const {
  return AdaptiveSolver(problem.coarse, space, snapshot, spectral, adaptive);
}

ErrorMetrics compute_metrics(const FineGrid& grid, const Vector& u_h, const Vector& u_snap, const Vector& u_ms,
                             const CellField& a, const CellField& b) {
  if (u_h.size() != grid.num_edges() || u_snap.size() != u_h.size() || u_ms.size() != u_h.size()) {
    throw Error(ErrorKind::DimensionMismatch, "metric vectors do not match the grid");
  }
  const Norms ref_h = weighted_norms(grid, u_h, a, b);
  const Norms ref_snap = weighted_norms(grid, u_snap, a, b);
  if (ref_h.energy == 0 || ref_snap.energy == 0 || ref_snap.l2 == 0) {
    throw Error(ErrorKind::InvalidArgument, "relative error against a zero reference");
  }
  const Norms d_h = weighted_norms(grid, u_h - u_snap, a, b);
  const Norms d_ms = weighted_norms(grid, u_snap - u_ms, a, b);
  return {d_h.energy / ref_h.energy, d_ms.energy / ref_snap.energy, d_ms.l2 / ref_snap.l2};
}

ConvergenceTable convergence_study(const RunConfig& config) {
  config.validate();
  for (int c : config.coarse_list)
    if (config.n % c != 0)
      throw Error(ErrorKind::Config, "coarse_list entry " + std::to_string(c) + " does not divide n");
  ConvergenceTable table;
  table.coarse = config.coarse_list;
  table.p = config.p_list;
  table.kappa0 = config.kappa0;
  table.e1_tilde.assign(table.coarse.size(), std::vector<double>(table.p.size()));
  for (std::size_t col = 0; col < table.p.size(); ++col) {
    RunConfig c = config;
    c.p = table.p[col];
    const Problem prob = setup_problem(c);
    const Vector u_h = solve_fine(prob);
    for (std::size_t row = 0; row < table.coarse.size(); ++row) {
      const CoarseGrid coarse = build_coarse_grid(prob.fine, table.coarse[row]);
      const SnapshotSpace space = build_snapshot_space(coarse, prob.a, prob.b);
      const SnapshotProblem sp = build_snapshot_problem(space, prob.curl_factor, prob.mass, prob.l2_mass, prob.F);
      const Vector u_snap = space.basis * sp.snap_coeffs;
      table.e1_tilde[row][col] = compute_metrics(prob.fine, u_h, u_snap, u_snap, prob.a, prob.b).e1_tilde;
    }
  }
  return table;
}

void write_convergence_csv(const ConvergenceTable& table, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot open " + path.string() + " for writing");
  char buf[64];
  out << "H";
  for (double p : table.p) {
    std::snprintf(buf, sizeof buf, ",contrast_%.0e", std::pow(table.kappa0, p));
    out << buf;
  }
  out << '\n';
  for (std::size_t row = 0; row < table.coarse.size(); ++row) {
    std::snprintf(buf, sizeof buf, "%.17g", 1.0 / table.coarse[row]);
    out << buf;
    for (double e : table.e1_tilde[row]) {
      std::snprintf(buf, sizeof buf, ",%.17g", e);
      out << buf;
    }
    out << '\n';
  }
  if (!out) throw Error(ErrorKind::Io, "failed writing " + path.string());
}

AdaptiveComparison adaptive_vs_uniform(const Pipeline& pipeline) {
  AdaptiveComparison cmp;
  cmp.uniform = pipeline.solver().run_uniform();
  cmp.budget = cmp.uniform.rows.back().dof;
  cmp.uniform_e1 = cmp.uniform.rows.back().e1;

  AdaptiveConfig capped = pipeline.config.adaptive();
  capped.dof_cap = cmp.budget;
  cmp.adaptive = pipeline.solver(capped).run_offline();
  cmp.adaptive_e1 = cmp.adaptive.rows.front().e1;
  for (const auto& row : cmp.adaptive.rows)
    if (row.dof <= cmp.budget) cmp.adaptive_e1 = row.e1;
  return cmp;
}

History offline_online_experiment(const Pipeline& pipeline) {
  return pipeline.solver().run_offline_online();
}

}  // namespace hcms
