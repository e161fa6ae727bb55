#ifndef HCMS_ADAPTIVE_HPP
#define HCMS_ADAPTIVE_HPP

#include <array>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "hcms/offline.hpp"

namespace hcms {

/// Dual norm of the residual functional v -> a(u, v) - f(v) over a set of
/// snapshot columns, measured in the energy norm of their support. The Gram
/// matrix of the columns is factorized once (pivoted, drop tolerance 1e-12).
class LocalDualNorm {
 public:
  LocalDualNorm(const SnapshotProblem& problem, std::vector<int> columns);

  const std::vector<int>& columns() const noexcept { return columns_; }
  const Matrix& gram() const noexcept { return gram_; }
  int rank() const noexcept { return factor_.rank(); }

  /// Residual functional on the columns, sliced from a full snapshot
  /// residual (see snapshot_residual).
  Vector functional(const Vector& residual) const;
  /// ||R||^2 = g^T G^{-1} g.
  double norm2(const Vector& functional) const { return factor_.dual_norm2(functional); }
  /// Riesz representer coefficients c with G c = g (over the columns).
  Vector representer(const Vector& functional) const { return factor_.solve(functional); }

 private:
  std::vector<int> columns_;
  Matrix gram_;
  PivotedCholesky factor_;
};

/// gram * u - load: the residual functional on every snapshot column.
Vector snapshot_residual(const SnapshotProblem& problem, const Vector& u);

/// ||R||^2 for an arbitrary column set (factorizes on each call).
double residual_norm2(const SnapshotProblem& problem, const std::vector<int>& columns, const Vector& u);

struct ResidualReport {
  std::vector<double> residual2;    ///< ||R_i||^2
  std::vector<double> next_lambda;  ///< lambda_{l_i+1}, +inf when exhausted
  std::vector<double> eta2;         ///< ||R_i||^2 / lambda_{l_i+1}
  double sum_eta2 = 0;
};

/// Dörfler-type marking: the smallest k whose k largest indicators carry a
/// fraction theta of the total. Order: eta descending, ties by ascending
/// neighbourhood id. At least one entry is marked when the total is positive.
std::vector<int> offline_mark(std::span<const double> eta2, double theta);

/// Smallest s >= 1 with lambda_{l+1} / lambda_{l+s+1} <= delta0 (1-based
/// eigenvalues, lambda_{J+1} = +inf), hence at most J - l.
int offline_enrich_count(std::span<const double> lambdas, int l, double delta0);

/// Square 2x2 coarse-cell region around interior coarse node (i, j).
struct OnlineRegion {
  int anchor_i = 0;
  int anchor_j = 0;
  int group = 0;                     ///< parity group 1..4
  std::array<int, 4> coarse_cells{};
  std::array<int, 4> neighborhoods{};  ///< interior indices of the 4 cross edges
  std::vector<int> columns;            ///< snapshot columns of V_Omega, ascending
  std::vector<int> fine_cells;         ///< sorted
};

/// All regions, grouped by parity of the anchor: group 1 (odd, odd),
/// 2 (odd, even), 3 (even, odd), 4 (even, even). Needs N >= 2.
std::array<std::vector<OnlineRegion>, 4> build_online_regions(const CoarseGrid& coarse,
                                                              const SnapshotSpace* space = nullptr);

struct AdaptiveConfig {
  double theta = 0.2;
  double delta0 = 0.7;
  double delta = 0.5;
  double percentage = 0.25;
  int initial_number = 1;
  int online_iterations = 4;
  double stop_tol = 1e-10;   ///< relative to the first sum of eta^2
  int dof_cap = 0;           ///< 0 means dim V_snap
  int max_iterations = 1000;
  int uniform_levels = 4;
  bool keep_solutions = true;
  bool record_timing = true;

  void validate() const;
};

enum class Phase { Offline, Online, Uniform };
std::string_view to_string(Phase phase);

struct IterationRecord {
  int iteration = 0;
  Phase phase = Phase::Offline;
  int dof = 0;
  double e1 = 0;
  double e2 = 0;
  double sum_eta2 = 0;
  double wall_ms = 0;
  double error_energy2 = 0;     ///< ||u_snap - u_ms||^2 in the energy norm
  double online_residual2 = 0;  ///< sum of ||R_Omega||^2 behind this online step
  int enriched = 0;             ///< neighbourhoods or regions enriched to reach this row
  int saturated = 0;            ///< size of the saturated set J
  Vector solution;              ///< u_ms in snapshot coordinates (if kept)
};

struct OnlineVectorRecord {
  int iteration = 0;
  int group = 0;
  int region = 0;  ///< index within the group
  double residual2 = 0;
  Vector coefficients;  ///< snapshot coordinates
};

struct History {
  std::vector<IterationRecord> rows;
  std::vector<OnlineVectorRecord> online_vectors;
  int switch_row = -1;  ///< first online row, -1 if none
  std::string stop_reason;
};

/// CSV columns: iteration,phase,DOF,e1,e2,sum_eta2,wall_ms.
void write_history_csv(const History& history, std::ostream& out);
void write_history_csv(const History& history, const std::filesystem::path& path);

struct AdaptState {
  int iteration = 0;
  Phase phase = Phase::Offline;
  MultiscaleSpace space;
  MsSolution solution;
  ResidualReport report;
  std::vector<bool> saturated;  ///< the set J of the offline-online method
  double initial_sum_eta2 = 0;
};

struct OfflineStep {
  std::vector<int> marked;
  std::vector<int> added;  ///< s_i per marked neighbourhood
  bool enriched = false;
};

struct OnlineStep {
  int group = 0;
  std::array<double, 4> group_residual2{};
  double used_residual2 = 0;
  int added = 0;
};

/// Offline, online, uniform and coupled enrichment on a fixed snapshot space.
class AdaptiveSolver {
 public:
  AdaptiveSolver(const CoarseGrid& coarse, const SnapshotSpace& snapshots, const SnapshotProblem& problem,
                 std::shared_ptr<const SpectralData> spectral, AdaptiveConfig config);

  const AdaptiveConfig& config() const noexcept { return config_; }
  const std::array<std::vector<OnlineRegion>, 4>& regions() const noexcept { return regions_; }

  /// l_i = initial number, solved, indicators computed; iteration 0.
  AdaptState initial_state() const;
  ResidualReport indicators(const MultiscaleSpace& space, const Vector& u) const;
  /// Re-solve u_ms and refresh indicators after the space changed.
  void resolve(AdaptState& state) const;

  /// Mark, enrich, re-solve and refresh the indicators once.
  OfflineStep offline_iterate(AdaptState& state) const;
  /// Uniform level: one more eigenvector in every unexhausted neighbourhood.
  bool uniform_iterate(AdaptState& state) const;
  /// Pick the parity group with the largest residual mass and add one Riesz
  /// representer per region in it.
  OnlineStep online_iterate(AdaptState& state, History* history = nullptr) const;

  History run_offline() const;
  History run_uniform() const;
  History run_online() const;
  History run_offline_online() const;

  IterationRecord record(const AdaptState& state, double wall_ms) const;
  double energy_error2(const Vector& u) const;

 private:
  /// Empty when the loop may continue, otherwise the stop reason.
  std::string offline_stop(const AdaptState& state) const;
  int dof_cap() const;

  const CoarseGrid* coarse_;
  const SnapshotSpace* snapshots_;
  const SnapshotProblem* problem_;
  std::shared_ptr<const SpectralData> spectral_;
  AdaptiveConfig config_;
  std::vector<LocalDualNorm> local_norms_;
  std::array<std::vector<OnlineRegion>, 4> regions_;
  std::array<std::vector<LocalDualNorm>, 4> region_norms_;
};

}  // namespace hcms

#endif  // HCMS_ADAPTIVE_HPP
