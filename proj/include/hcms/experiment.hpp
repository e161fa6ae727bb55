#ifndef HCMS_EXPERIMENT_HPP
#define HCMS_EXPERIMENT_HPP

#include <filesystem>
#include <memory>
#include <vector>

#include "hcms/adaptive.hpp"
#include "hcms/config.hpp"
#include "hcms/linsolve.hpp"

namespace hcms {

/// Grids, coefficients and fine-scale system of one run.
struct Problem {
  FineGrid fine;
  CoarseGrid coarse;
  CellField kappa;
  CellField a;
  CellField b;
  VectorCellField f;
  SparseMatrix A;            ///< curl + mass over all edges
  SparseMatrix curl_factor;  ///< C with C^T C the curl part
  SparseMatrix mass;         ///< b-weighted edge mass
  SparseMatrix l2_mass;      ///< unweighted edge mass
  Vector F;
};

Problem setup_problem(const RunConfig& config);

/// kappa from kappa_file if set, otherwise generated from pattern/seed/density.
CellField make_kappa(const RunConfig& config, const FineGrid& fine);

/// Reference solution u_h on all edges (boundary entries zero).
Vector solve_fine(const Problem& problem, SolveReport* report = nullptr);

/// Snapshot space, its Galerkin problem and the spectral data on top of a
/// problem. Not movable: solvers keep pointers into it.
struct Pipeline {
  explicit Pipeline(const RunConfig& config);
  Pipeline(const Pipeline&) = delete;
  Pipeline& operator=(const Pipeline&) = delete;

  RunConfig config;
  Problem problem;
  SnapshotSpace space;
  SnapshotProblem snapshot;
  std::shared_ptr<const SpectralData> spectral;

  Vector snapshot_solution() const { return space.basis * snapshot.snap_coeffs; }
  AdaptiveSolver solver(const AdaptiveConfig& adaptive) const;
  AdaptiveSolver solver() const { return solver(config.adaptive()); }
};

struct ErrorMetrics {
  double e1_tilde = 0;  ///< ||u_h - u_snap|| / ||u_h||, energy
  double e1 = 0;        ///< ||u_snap - u_ms|| / ||u_snap||, energy
  double e2 = 0;        ///< same in plain L2
};

/// Throws InvalidArgument when u_h or u_snap has zero norm.
ErrorMetrics compute_metrics(const FineGrid& grid, const Vector& u_h, const Vector& u_snap, const Vector& u_ms,
                             const CellField& a, const CellField& b);

struct ConvergenceTable {
  std::vector<int> coarse;  ///< N per row (H = 1/N)
  std::vector<double> p;    ///< contrast power per column
  double kappa0 = 10;
  std::vector<std::vector<double>> e1_tilde;  ///< [row][column]
};

/// e1_tilde for every (N, p) in config.coarse_list x config.p_list on one kappa.
/// Throws Config when a coarse_list entry does not divide n.
ConvergenceTable convergence_study(const RunConfig& config);
/// Columns: H, then one contrast_<kappa0^p> column per p.
void write_convergence_csv(const ConvergenceTable& table, const std::filesystem::path& path);

struct AdaptiveComparison {
  History adaptive;
  History uniform;
  int budget = 0;           ///< DOF of the last uniform level
  double adaptive_e1 = 0;   ///< last adaptive row with DOF <= budget
  double uniform_e1 = 0;
};

/// Uniform enrichment for uniform_levels levels, then the offline adaptive
/// loop capped at the DOF the uniform run reached.
AdaptiveComparison adaptive_vs_uniform(const Pipeline& pipeline);

History offline_online_experiment(const Pipeline& pipeline);

}  // namespace hcms

#endif  // HCMS_EXPERIMENT_HPP
