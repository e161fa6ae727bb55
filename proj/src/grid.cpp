#include "hcms/grid.hpp"

#include <algorithm>
#include <string>

#include "hcms/error.hpp"

namespace hcms {

FineGrid::FineGrid(int n) : n_(n) {
  if (n < 2) {
    throw Error(ErrorKind::InvalidMesh, "fine grid needs n >= 2, got " + std::to_string(n));
  }
}

bool FineGrid::is_boundary(int e) const noexcept {
  if (is_x_edge(e)) {
    const int row = e / n_;
    return row == 0 || row == n_;
  }
  const int col = (e - num_x_edges()) % (n_ + 1);
  return col == 0 || col == n_;
}

std::array<int, 4> FineGrid::cell_edges(int c) const noexcept {
  const int i = cell_i(c);
  const int j = cell_j(c);
  return {x_edge(j, i), x_edge(j + 1, i), y_edge(j, i), y_edge(j, i + 1)};
}

std::array<int, 2> FineGrid::edge_cells(int e) const noexcept {
  if (is_x_edge(e)) {
    const int row = e / n_;
    const int col = e % n_;
    return {row > 0 ? cell(col, row - 1) : -1, row < n_ ? cell(col, row) : -1};
  }
  const int k = e - num_x_edges();
  const int row = k / (n_ + 1);
  const int col = k % (n_ + 1);
  return {col > 0 ? cell(col - 1, row) : -1, col < n_ ? cell(col, row) : -1};
}

bool FineGrid::is_boundary_node(int v) const noexcept {
  const int row = v / (n_ + 1);
  const int col = v % (n_ + 1);
  return row == 0 || row == n_ || col == 0 || col == n_;
}

std::array<int, 2> FineGrid::edge_nodes(int e) const noexcept {
  if (is_x_edge(e)) {
    const int row = e / n_;
    const int col = e % n_;
    return {node(col, row), node(col + 1, row)};
  }
  const int k = e - num_x_edges();
  const int row = k / (n_ + 1);
  const int col = k % (n_ + 1);
  return {node(col, row), node(col, row + 1)};
}

std::array<double, 2> FineGrid::cell_midpoint(int c) const noexcept {
  return {(cell_i(c) + 0.5) * h(), (cell_j(c) + 0.5) * h()};
}

std::vector<int> FineGrid::interior_nodes() const {
  std::vector<int> nodes;
  nodes.reserve(static_cast<std::size_t>((n_ - 1) * (n_ - 1)));
  for (int row = 1; row < n_; ++row)
    for (int col = 1; col < n_; ++col) nodes.push_back(node(col, row));
  return nodes;
}

CoarseGrid::CoarseGrid(const FineGrid& fine, int N) : fine_(fine), N_(N), r_(0) {
  if (N < 1 || fine.n() % N != 0) {
    throw Error(ErrorKind::IncompatibleGrids, "coarse count " + std::to_string(N) +
                                                  " does not divide fine count " +
                                                  std::to_string(fine.n()));
  }
  r_ = fine.n() / N;
}

CoarseEdge CoarseGrid::edge(int id) const {
  if (id < 0 || id >= num_edges()) {
    throw Error(ErrorKind::InvalidArgument, "coarse edge id out of range: " + std::to_string(id));
  }
  const int nh = N_ * (N_ + 1);
  if (id < nh) return {CoarseEdgeKind::Horizontal, id / N_, id % N_};
  const int k = id - nh;
  return {CoarseEdgeKind::Vertical, k / (N_ + 1), k % (N_ + 1)};
}

bool CoarseGrid::is_interior(int id) const { return interior_index(id) >= 0; }

int CoarseGrid::interior_index(int id) const {
  const CoarseEdge ce = edge(id);
  if (ce.kind == CoarseEdgeKind::Horizontal) {
    if (ce.row == 0 || ce.row == N_) return -1;
    return (ce.row - 1) * N_ + ce.col;
  }
  if (ce.col == 0 || ce.col == N_) return -1;
  return N_ * (N_ - 1) + ce.row * (N_ - 1) + (ce.col - 1);
}

int CoarseGrid::interior_edge(int k) const {
  if (k < 0 || k >= num_interior_edges()) {
    throw Error(ErrorKind::InvalidArgument, "interior edge index out of range: " + std::to_string(k));
  }
  const int nh_int = N_ * (N_ - 1);
  if (k < nh_int) {
    const int row = k / N_ + 1;
    const int col = k % N_;
    return row * N_ + col;
  }
  const int m = k - nh_int;
  const int row = m / (N_ - 1);
  const int col = m % (N_ - 1) + 1;
  return N_ * (N_ + 1) + row * (N_ + 1) + col;
}

std::vector<int> CoarseGrid::fine_cells(int K) const {
  const int I = K % N_;
  const int J = K / N_;
  std::vector<int> cells;
  cells.reserve(static_cast<std::size_t>(r_ * r_));
  for (int j = J * r_; j < (J + 1) * r_; ++j)
    for (int i = I * r_; i < (I + 1) * r_; ++i) cells.push_back(fine_.cell(i, j));
  return cells;
}

int CoarseGrid::coarse_cell_of(int fine_cell) const noexcept {
  return cell(fine_.cell_i(fine_cell) / r_, fine_.cell_j(fine_cell) / r_);
}

std::vector<int> CoarseGrid::fine_edges_on(int id) const {
  const CoarseEdge ce = edge(id);
  std::vector<int> edges;
  edges.reserve(static_cast<std::size_t>(r_));
  for (int k = 0; k < r_; ++k) {
    if (ce.kind == CoarseEdgeKind::Horizontal)
      edges.push_back(fine_.x_edge(ce.row * r_, ce.col * r_ + k));
    else
      edges.push_back(fine_.y_edge(ce.row * r_ + k, ce.col * r_));
  }
  return edges;
}

std::array<int, 2> CoarseGrid::edge_cells(int id) const {
  const CoarseEdge ce = edge(id);
  if (ce.kind == CoarseEdgeKind::Horizontal) {
    return {ce.row > 0 ? cell(ce.col, ce.row - 1) : -1, ce.row < N_ ? cell(ce.col, ce.row) : -1};
  }
  return {ce.col > 0 ? cell(ce.col - 1, ce.row) : -1, ce.col < N_ ? cell(ce.col, ce.row) : -1};
}

int Neighborhood::local_of(int global_edge) const noexcept {
  const auto it = std::lower_bound(local_edges.begin(), local_edges.end(), global_edge);
  if (it == local_edges.end() || *it != global_edge) return -1;
  return static_cast<int>(it - local_edges.begin());
}

FineGrid build_fine_grid(int n) { return FineGrid(n); }

CoarseGrid build_coarse_grid(const FineGrid& fine, int N) { return CoarseGrid(fine, N); }

std::vector<int> edges_of_cells(const FineGrid& grid, std::span<const int> cells) {
  std::vector<int> edges;
  edges.reserve(cells.size() * 4);
  for (int c : cells)
    for (int e : grid.cell_edges(c)) edges.push_back(e);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

Neighborhood neighborhood(const CoarseGrid& coarse, int coarse_edge_id) {
  const int k = coarse.interior_index(coarse_edge_id);
  if (k < 0) {
    throw Error(ErrorKind::NotInterior,
                "coarse edge " + std::to_string(coarse_edge_id) + " lies on the domain boundary");
  }
  const FineGrid& fine = coarse.fine();
  Neighborhood nb;
  nb.index = k;
  nb.coarse_edge = coarse_edge_id;
  nb.coarse_cells = coarse.edge_cells(coarse_edge_id);
  for (int K : nb.coarse_cells) {
    auto cells = coarse.fine_cells(K);
    nb.fine_cells.insert(nb.fine_cells.end(), cells.begin(), cells.end());
  }
  std::sort(nb.fine_cells.begin(), nb.fine_cells.end());
  nb.local_edges = edges_of_cells(fine, nb.fine_cells);

  // An edge of omega_i is interior iff both of its cells lie in omega_i.
  auto in_patch = [&](int c) {
    return c >= 0 && std::binary_search(nb.fine_cells.begin(), nb.fine_cells.end(), c);
  };
  for (int e : nb.local_edges) {
    const auto cells = fine.edge_cells(e);
    if (in_patch(cells[0]) && in_patch(cells[1])) nb.interior_edges.push_back(e);
  }
  nb.trace_edges = coarse.fine_edges_on(coarse_edge_id);
  return nb;
}

Neighborhood neighborhood_at(const CoarseGrid& coarse, int interior_index) {
  return neighborhood(coarse, coarse.interior_edge(interior_index));
}

}  // namespace hcms
