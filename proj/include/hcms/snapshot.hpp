#ifndef HCMS_SNAPSHOT_HPP
#define HCMS_SNAPSHOT_HPP

#include <memory>
#include <vector>

#include "hcms/assembly.hpp"
#include "hcms/grid.hpp"

namespace hcms {

/// Discrete (curl a curl + b)-harmonic extensions inside one coarse block:
/// tangential data on one boundary fine edge, zero on the rest of the block
/// boundary. The block interior system is factorized once.
class BlockExtension {
 public:
  BlockExtension(const CoarseGrid& coarse, int coarse_cell, const CellField& a, const CellField& b);
  ~BlockExtension();
  BlockExtension(BlockExtension&&) noexcept;
  BlockExtension& operator=(BlockExtension&&) noexcept;

  int coarse_cell() const noexcept { return coarse_cell_; }
  /// Fine edges interior to the block, sorted.
  const std::vector<int>& interior_edges() const noexcept { return interior_; }
  /// Interior values of the extension of unit data on a block-boundary edge.
  Vector extend(int boundary_edge) const;

 private:
  struct Impl;
  int coarse_cell_;
  std::vector<int> interior_;
  std::unique_ptr<Impl> impl_;
};

/// Snapshot functions psi_j of one neighbourhood, as columns over the
/// neighbourhood's fine edges (Neighborhood::local_edges).
struct LocalSnapshots {
  int neighborhood = -1;
  std::vector<int> edges;  ///< global fine edge ids, sorted
  Matrix values;           ///< edges.size() x J_i

  int count() const noexcept { return static_cast<int>(values.cols()); }
  /// Column j scattered into a full-length edge vector.
  Vector global_column(int j, int num_edges) const;
};

LocalSnapshots local_snapshot_basis(const CoarseGrid& coarse, const Neighborhood& nb,
                                    const CellField& a, const CellField& b);

struct BlockRange {
  int offset = 0;
  int count = 0;
};

/// Direct sum of all local snapshot spaces. Columns are ordered by
/// neighbourhood (interior coarse edge) index, then by fine edge along E_i.
struct SnapshotSpace {
  std::vector<Neighborhood> neighborhoods;
  std::vector<LocalSnapshots> locals;
  std::vector<BlockRange> blocks;
  SparseMatrix basis;  ///< num_edges x dim

  int dim() const noexcept { return static_cast<int>(basis.cols()); }
  int num_blocks() const noexcept { return static_cast<int>(blocks.size()); }
};

SnapshotSpace build_snapshot_space(const CoarseGrid& coarse, const CellField& a, const CellField& b);

struct GalerkinSolution {
  Vector coefficients;  ///< in the columns of the basis
  Vector u;             ///< basis * coefficients
  int rank = 0;         ///< retained directions (== cols unless near-dependent)
};

/// Galerkin projection: find u in span(B) with B^T (A u - F) = 0. Solved by
/// sparse Cholesky; near-singular projected systems fall back to a pivoted
/// dense factorization with drop tolerance 1e-12 relative to the largest
/// diagonal entry.
GalerkinSolution solve_in_space(const SparseMatrix& basis, const SparseMatrix& A, const Vector& F);

/// Everything the adaptive loops need, expressed in snapshot coordinates.
struct SnapshotProblem {
  SparseMatrix gram;     ///< B^T A B (energy inner product)
  SparseMatrix l2_gram;  ///< B^T M B with b = 1 (plain L2 inner product)
  Vector load;           ///< B^T F
  Vector snap_coeffs;    ///< u_snap in snapshot coordinates
  double snap_energy2 = 0;
  double snap_l2_2 = 0;
};

/// A is the full curl-curl + b-mass matrix, l2_mass the b = 1 mass matrix.
SnapshotProblem build_snapshot_problem(const SnapshotSpace& space, const SparseMatrix& A,
                                       const SparseMatrix& l2_mass, const Vector& F);
/// Same, with the energy Gram formed as (C B)^T (C B) + B^T M B from the
/// curl factor C and the b-weighted mass M (see curl_factor).
SnapshotProblem build_snapshot_problem(const SnapshotSpace& space, const SparseMatrix& curl_factor,
                                       const SparseMatrix& mass, const SparseMatrix& l2_mass, const Vector& F);

/// Dense copy of gram restricted to a set of snapshot columns.
Matrix gram_block(const SparseMatrix& gram, const std::vector<int>& columns);

}  // namespace hcms

#endif  // HCMS_SNAPSHOT_HPP
