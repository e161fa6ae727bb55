#ifndef HCMS_ASSEMBLY_HPP
#define HCMS_ASSEMBLY_HPP

#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "hcms/fields.hpp"
#include "hcms/grid.hpp"

namespace hcms {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Cell matrices of the lowest-order edge element on an h x h square, local
/// order (bottom, top, left, right). DOFs are tangential edge integrals, so
/// the basis function of an edge has tangential value 1/h on it.
struct ElementMatrices {
  Eigen::Matrix4d curl;  ///< a * s s^T / h^2 with s = (1, -1, -1, 1)
  Eigen::Matrix4d mass;  ///< b/3 on the diagonal, b/6 between parallel edges
};

ElementMatrices element_matrices(double h, double a, double b);

/// Curl-curl and mass parts over all edges (boundary included).
struct GlobalMatrices {
  SparseMatrix curl;
  SparseMatrix mass;

  SparseMatrix total() const { return curl + mass; }
};

GlobalMatrices assemble_global(const FineGrid& grid, const CellField& a, const CellField& b);

/// Cells x edges matrix C with row c equal to sqrt(a_c) s / h, so that the
/// curl part is C^T C. Energy products formed through C avoid the
/// cancellation of v^T K w for nearly curl-free fields in stiff cells.
SparseMatrix curl_factor(const FineGrid& grid, const CellField& a);

/// Sum of curl and mass parts over a subset of cells, in the local numbering
/// given by the sorted edge list `local_edges`.
SparseMatrix assemble_local(const FineGrid& grid, std::span<const int> cells,
                            std::span<const int> local_edges, const CellField& a,
                            const CellField& b);

/// Load vector over all edges: each edge collects f.t * h/2 from its cells.
Vector assemble_load(const FineGrid& grid, const VectorCellField& f);

/// Retained (interior) edges and their position in the full edge numbering.
class DofMap {
 public:
  explicit DofMap(const FineGrid& grid);

  int num_full() const noexcept { return static_cast<int>(full_to_reduced_.size()); }
  int num_reduced() const noexcept { return static_cast<int>(reduced_to_full_.size()); }
  /// -1 for eliminated boundary edges.
  int reduced(int full) const noexcept { return full_to_reduced_[static_cast<std::size_t>(full)]; }
  int full(int reduced) const noexcept { return reduced_to_full_[static_cast<std::size_t>(reduced)]; }

  Vector expand(const Vector& reduced) const;
  Vector restrict_to_interior(const Vector& full) const;

 private:
  std::vector<int> full_to_reduced_;
  std::vector<int> reduced_to_full_;
};

struct ReducedSystem {
  SparseMatrix A;
  Vector F;
  DofMap map;
};

/// Eliminates tangential boundary DOFs (u.t = 0 on the boundary).
ReducedSystem apply_essential_bc(const SparseMatrix& A, const Vector& F, const FineGrid& grid);

struct Norms {
  double energy = 0;  ///< H(curl)(a,b) norm
  double curl = 0;    ///< a-weighted curl seminorm
  double l2b = 0;     ///< b-weighted L2 norm
  double l2 = 0;      ///< plain L2 norm
};

/// Norms of a full-length edge vector restricted to a set of cells.
Norms weighted_norms(const FineGrid& grid, const Vector& v, std::span<const int> cells,
                     const CellField& a, const CellField& b);
Norms weighted_norms(const FineGrid& grid, const Vector& v, const CellField& a, const CellField& b);

/// Edge values of the gradient of a nodal function supported on interior
/// nodes: (Gp)_e = p(head) - p(tail). Columns follow FineGrid::interior_nodes().
SparseMatrix discrete_gradient(const FineGrid& grid);

/// Debug dump: header "# rows cols nnz", then one "row col value" line per
/// stored entry (0-based, column-major order).
void write_triplets(const SparseMatrix& m, const std::filesystem::path& path);

}  // namespace hcms

#endif  // HCMS_ASSEMBLY_HPP
