#ifndef HCMS_GRID_HPP
#define HCMS_GRID_HPP

#include <array>
#include <span>
#include <vector>

namespace hcms {

/// Uniform n x n partition of the unit square with lowest-order edge DOFs.
///
/// Edge numbering: x-oriented edges first, row-major by (row, col) with
/// row in [0, n] and col in [0, n); then y-oriented edges, row-major with
/// row in [0, n) and col in [0, n]. Every x-edge points in +x, every y-edge
/// in +y. Cell (i, j) has index j*n + i, i along x. Nodes are numbered
/// row-major on the (n+1) x (n+1) lattice.
class FineGrid {
 public:
  explicit FineGrid(int n);

  int n() const noexcept { return n_; }
  double h() const noexcept { return 1.0 / n_; }

  int num_cells() const noexcept { return n_ * n_; }
  int num_x_edges() const noexcept { return n_ * (n_ + 1); }
  int num_y_edges() const noexcept { return (n_ + 1) * n_; }
  int num_edges() const noexcept { return num_x_edges() + num_y_edges(); }
  int num_boundary_edges() const noexcept { return 4 * n_; }
  int num_interior_edges() const noexcept { return num_edges() - num_boundary_edges(); }
  int num_nodes() const noexcept { return (n_ + 1) * (n_ + 1); }

  int cell(int i, int j) const noexcept { return j * n_ + i; }
  int cell_i(int c) const noexcept { return c % n_; }
  int cell_j(int c) const noexcept { return c / n_; }

  int x_edge(int row, int col) const noexcept { return row * n_ + col; }
  int y_edge(int row, int col) const noexcept { return num_x_edges() + row * (n_ + 1) + col; }
  bool is_x_edge(int e) const noexcept { return e < num_x_edges(); }
  bool is_boundary(int e) const noexcept;

  /// (bottom, top, left, right) edges of a cell.
  std::array<int, 4> cell_edges(int c) const noexcept;

  /// Cells sharing the edge; -1 marks a missing neighbour on the boundary.
  std::array<int, 2> edge_cells(int e) const noexcept;

  int node(int col, int row) const noexcept { return row * (n_ + 1) + col; }
  bool is_boundary_node(int v) const noexcept;
  /// (tail, head) under the global +x / +y orientation.
  std::array<int, 2> edge_nodes(int e) const noexcept;

  std::array<double, 2> cell_midpoint(int c) const noexcept;

  /// Interior nodes in ascending node order.
  std::vector<int> interior_nodes() const;

 private:
  int n_;
};

/// Orientation of a coarse edge: Horizontal edges run along x.
enum class CoarseEdgeKind { Horizontal, Vertical };

struct CoarseEdge {
  CoarseEdgeKind kind;
  int row;
  int col;
};

/// N x N coarse partition whose cells are r x r blocks of fine cells.
///
/// Coarse edges use the same layout as fine edges. Interior coarse edges are
/// additionally enumerated 0..N_e-1: horizontal ones first (row-major),
/// then vertical ones; this interior index is the neighbourhood id.
class CoarseGrid {
 public:
  CoarseGrid(const FineGrid& fine, int N);

  const FineGrid& fine() const noexcept { return fine_; }
  int N() const noexcept { return N_; }
  int ratio() const noexcept { return r_; }
  double H() const noexcept { return 1.0 / N_; }

  int num_cells() const noexcept { return N_ * N_; }
  int cell(int I, int J) const noexcept { return J * N_ + I; }
  int num_edges() const noexcept { return 2 * N_ * (N_ + 1); }
  int num_interior_edges() const noexcept { return 2 * N_ * (N_ - 1); }

  CoarseEdge edge(int coarse_edge_id) const;
  bool is_interior(int coarse_edge_id) const;
  /// Global coarse edge id of the k-th interior edge.
  int interior_edge(int k) const;
  /// Interior index of a coarse edge, or -1 on the boundary.
  int interior_index(int coarse_edge_id) const;

  /// Fine cells of coarse cell K in ascending order.
  std::vector<int> fine_cells(int K) const;
  /// Coarse cell containing a fine cell.
  int coarse_cell_of(int fine_cell) const noexcept;

  /// Fine edges lying on a coarse edge, ordered by increasing coordinate.
  std::vector<int> fine_edges_on(int coarse_edge_id) const;
  /// Coarse cells adjacent to a coarse edge (below/left first), -1 if absent.
  std::array<int, 2> edge_cells(int coarse_edge_id) const;

 private:
  FineGrid fine_;
  int N_;
  int r_;
};

/// Coarse neighbourhood omega_i of an interior coarse edge E_i.
struct Neighborhood {
  int index = -1;        ///< interior index i
  int coarse_edge = -1;  ///< global coarse edge id of E_i
  std::array<int, 2> coarse_cells{-1, -1};
  std::vector<int> fine_cells;      ///< sorted
  std::vector<int> local_edges;     ///< all fine edges of omega_i, sorted; local -> global
  std::vector<int> interior_edges;  ///< fine edges not on the boundary of omega_i, sorted
  std::vector<int> trace_edges;     ///< the J_i fine edges on E_i, by increasing coordinate

  int num_trace() const noexcept { return static_cast<int>(trace_edges.size()); }
  /// Local position of a global fine edge, or -1 if outside omega_i.
  int local_of(int global_edge) const noexcept;
};

FineGrid build_fine_grid(int n);
CoarseGrid build_coarse_grid(const FineGrid& fine, int N);
/// Neighbourhood of a global coarse edge id; throws NotInterior on boundary edges.
Neighborhood neighborhood(const CoarseGrid& coarse, int coarse_edge_id);
/// Neighbourhood by interior index 0..N_e-1.
Neighborhood neighborhood_at(const CoarseGrid& coarse, int interior_index);

/// Fine edges touched by a set of cells, sorted and unique.
std::vector<int> edges_of_cells(const FineGrid& grid, std::span<const int> cells);

}  // namespace hcms

#endif  // HCMS_GRID_HPP
