#ifndef HCMS_OFFLINE_HPP
#define HCMS_OFFLINE_HPP

#include <filesystem>
#include <limits>
#include <memory>
#include <vector>

#include "hcms/linsolve.hpp"
#include "hcms/snapshot.hpp"

namespace hcms {

/// Local spectral problem a_i(v, w) = lambda s_i(v, w) on one neighbourhood,
/// posed in snapshot coordinates.
///   a_i: edge mass on E_i, sum over e_k of avg(b) * h * (v.t)(w.t)
///   s_i: (1/H) times the H(curl)(a,b; omega_i) Gram matrix
struct SpectralEntry {
  Matrix a;
  Matrix s;
  EigenPairs pairs;

  int size() const noexcept { return static_cast<int>(pairs.values.size()); }
  /// lambda_k for 1-based k; +inf for k = size() + 1.
  double lambda(int k) const;
};

using SpectralData = std::vector<SpectralEntry>;

SpectralEntry local_spectral(const CoarseGrid& coarse, const Neighborhood& nb,
                             const LocalSnapshots& snapshots, const CellField& a, const CellField& b);

SpectralData compute_spectral(const CoarseGrid& coarse, const SnapshotSpace& space, const CellField& a,
                              const CellField& b);

struct OfflineSelection {
  Matrix coefficients;  ///< J_i x l, snapshot coordinates
  Matrix fine;          ///< neighbourhood edges x l
  double next_lambda = std::numeric_limits<double>::infinity();
};

/// First l eigenvectors of the neighbourhood problem.
OfflineSelection select_offline(const SpectralEntry& entry, const LocalSnapshots& snapshots, int l);

/// Current multiscale space: l_i offline eigenvectors per neighbourhood
/// followed by appended online vectors. Vectors are kept in snapshot
/// coordinates; fine_basis() maps them to fine edge vectors.
class MultiscaleSpace {
 public:
  MultiscaleSpace(std::shared_ptr<const SpectralData> spectral, std::vector<BlockRange> blocks,
                  int initial_number);

  int num_neighborhoods() const noexcept { return static_cast<int>(counts_.size()); }
  int count(int i) const { return counts_.at(static_cast<std::size_t>(i)); }
  const std::vector<int>& counts() const noexcept { return counts_; }
  int max_count(int i) const { return (*spectral_)[static_cast<std::size_t>(i)].size(); }
  bool exhausted(int i) const { return count(i) >= max_count(i); }
  void set_count(int i, int l);

  /// lambda_{l_i + 1}, +inf once every eigenvector is in use.
  double next_lambda(int i) const;

  void add_online(Vector snapshot_coefficients);
  int num_online() const noexcept { return static_cast<int>(online_.size()); }
  const std::vector<Vector>& online() const noexcept { return online_; }

  int num_offline() const noexcept;
  int dim() const noexcept { return num_offline() + num_online(); }
  /// Column range of neighbourhood i's offline vectors in coordinates().
  BlockRange offline_block(int i) const;

  /// dim V_snap x dim basis in snapshot coordinates.
  SparseMatrix coordinates() const;
  /// Fine edge vectors: snapshot basis times coordinates().
  SparseMatrix fine_basis(const SnapshotSpace& snapshots) const;

  const SpectralData& spectral() const noexcept { return *spectral_; }
  const std::vector<BlockRange>& snapshot_blocks() const noexcept { return blocks_; }

 private:
  std::shared_ptr<const SpectralData> spectral_;
  std::vector<BlockRange> blocks_;
  std::vector<int> counts_;
  std::vector<Vector> online_;
};

struct MsSolution {
  Vector coefficients;  ///< in the multiscale basis
  Vector snap;          ///< the same function in snapshot coordinates
  int rank = 0;
};

/// Galerkin solve in V_ms, carried out in snapshot coordinates.
MsSolution solve_gmsfem(const MultiscaleSpace& space, const SnapshotProblem& problem);

/// CSV with one row per neighbourhood: neighborhood,coarse_edge,lambda_1,...
void write_eigenvalue_report(const SpectralData& spectral, const SnapshotSpace& space,
                             const std::filesystem::path& path);

}  // namespace hcms

#endif  // HCMS_OFFLINE_HPP
