#include "hcms/snapshot.hpp"

#include <algorithm>
#include <string>

#include <Eigen/SparseCholesky>

#include "hcms/error.hpp"
#include "hcms/linsolve.hpp"

namespace hcms {

struct BlockExtension::Impl {
  std::vector<int> edges;     // all block edges, sorted
  std::vector<int> boundary;  // block-boundary edges, sorted (global ids)
  SparseMatrix a_ii;
  SparseMatrix a_ib;
  Eigen::SimplicialLLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>> llt;
};

BlockExtension::BlockExtension(const CoarseGrid& coarse, int coarse_cell, const CellField& a,
                               const CellField& b)
    : coarse_cell_(coarse_cell), impl_(std::make_unique<Impl>()) {
  const FineGrid& fine = coarse.fine();
  const auto cells = coarse.fine_cells(coarse_cell);
  impl_->edges = edges_of_cells(fine, cells);
  const SparseMatrix local = assemble_local(fine, cells, impl_->edges, a, b);

  std::vector<int> interior_pos;
  std::vector<int> boundary_pos;
  for (std::size_t k = 0; k < impl_->edges.size(); ++k) {
    const int e = impl_->edges[k];
    const auto nbr = fine.edge_cells(e);
    const bool inside = nbr[0] >= 0 && nbr[1] >= 0 && coarse.coarse_cell_of(nbr[0]) == coarse_cell &&
                        coarse.coarse_cell_of(nbr[1]) == coarse_cell;
    if (inside) {
      interior_.push_back(e);
      interior_pos.push_back(static_cast<int>(k));
    } else {
      impl_->boundary.push_back(e);
      boundary_pos.push_back(static_cast<int>(k));
    }
  }

  std::vector<int> role(impl_->edges.size(), -1);
  for (std::size_t k = 0; k < interior_pos.size(); ++k) role[static_cast<std::size_t>(interior_pos[k])] = static_cast<int>(k);
  std::vector<Eigen::Triplet<double>> ii;
  std::vector<Eigen::Triplet<double>> ib;
  std::vector<int> bpos(impl_->edges.size(), -1);
  for (std::size_t k = 0; k < boundary_pos.size(); ++k) bpos[static_cast<std::size_t>(boundary_pos[k])] = static_cast<int>(k);
  for (int col = 0; col < local.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(local, col); it; ++it) {
      const int r = role[static_cast<std::size_t>(it.row())];
      if (r < 0) continue;
      if (const int c = role[static_cast<std::size_t>(col)]; c >= 0)
        ii.emplace_back(r, c, it.value());
      else
        ib.emplace_back(r, bpos[static_cast<std::size_t>(col)], it.value());
    }
  }
  const auto ni = static_cast<Eigen::Index>(interior_pos.size());
  impl_->a_ii.resize(ni, ni);
  impl_->a_ii.setFromTriplets(ii.begin(), ii.end());
  impl_->a_ib.resize(ni, static_cast<Eigen::Index>(boundary_pos.size()));
  impl_->a_ib.setFromTriplets(ib.begin(), ib.end());
  if (ni > 0) {
    impl_->llt.compute(impl_->a_ii);
    if (impl_->llt.info() != Eigen::Success) {
      throw Error(ErrorKind::Factorization,
                  "local block system is singular (coarse cell " + std::to_string(coarse_cell) + ")");
    }
  }
}

BlockExtension::~BlockExtension() = default;
BlockExtension::BlockExtension(BlockExtension&&) noexcept = default;
BlockExtension& BlockExtension::operator=(BlockExtension&&) noexcept = default;

Vector BlockExtension::extend(int boundary_edge) const {
  const auto& bd = impl_->boundary;
  const auto it = std::lower_bound(bd.begin(), bd.end(), boundary_edge);
  if (it == bd.end() || *it != boundary_edge) {
    throw Error(ErrorKind::InvalidArgument,
                "edge " + std::to_string(boundary_edge) + " is not on the block boundary");
  }
  if (interior_.empty()) return Vector();
  const Vector rhs = -Vector(impl_->a_ib.col(it - bd.begin()));
  Vector x = impl_->llt.solve(rhs);
  x += impl_->llt.solve(rhs - impl_->a_ii * x);
  return x;
}

Vector LocalSnapshots::global_column(int j, int num_edges) const {
  Vector v = Vector::Zero(num_edges);
  for (std::size_t k = 0; k < edges.size(); ++k) v[edges[k]] = values(static_cast<Eigen::Index>(k), j);
  return v;
}

namespace {

LocalSnapshots stitch(const Neighborhood& nb, const BlockExtension& first, const BlockExtension& second) {
  LocalSnapshots ls;
  ls.neighborhood = nb.index;
  ls.edges = nb.local_edges;
  ls.values = Matrix::Zero(static_cast<Eigen::Index>(ls.edges.size()), nb.num_trace());
  for (int j = 0; j < nb.num_trace(); ++j) {
    const int e = nb.trace_edges[static_cast<std::size_t>(j)];
    ls.values(nb.local_of(e), j) = 1.0;
    for (const BlockExtension* block : {&first, &second}) {
      const Vector ext = block->extend(e);
      const auto& inner = block->interior_edges();
      for (std::size_t k = 0; k < inner.size(); ++k)
        ls.values(nb.local_of(inner[k]), j) = ext[static_cast<Eigen::Index>(k)];
    }
  }
  return ls;
}

struct SystemSolution {
  Vector coefficients;
  int rank = 0;
};

// Projected SPD system M c = rhs.
SystemSolution solve_projected(const SparseMatrix& M, const Vector& rhs) {
  const Eigen::Index n = M.rows();
  SystemSolution out{Vector::Zero(n), static_cast<int>(n)};
  if (n == 0 || rhs.norm() == 0.0) return out;

  constexpr double tol = 1e-10;
  Eigen::SimplicialLLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>> llt(M);
  if (llt.info() == Eigen::Success) {
    Vector c = llt.solve(rhs);
    for (int step = 0; step < 3; ++step) {
      const double res = (M * c - rhs).norm() / rhs.norm();
      if (res <= tol) break;
      c += llt.solve(rhs - M * c);
    }
    const double res = (M * c - rhs).norm() / rhs.norm();
    if (res <= tol && c.allFinite()) {
      out.coefficients = std::move(c);
      return out;
    }
  }

  const PivotedCholesky pc{Matrix(M)};
  out.coefficients = pc.solve(rhs);
  out.rank = pc.rank();
  const auto kept = pc.kept();
  const Vector r = M * out.coefficients - rhs;
  double worst = 0.0;
  for (int k : kept) worst = std::max(worst, std::abs(r[k]));
  if (!(worst <= 1e-8 * rhs.cwiseAbs().maxCoeff())) {
    throw Error(ErrorKind::Factorization, "projected Galerkin system could not be solved (rank " +
                                              std::to_string(out.rank) + " of " + std::to_string(n) + ")");
  }
  return out;
}

SparseMatrix symmetric_projection(const SparseMatrix& B, const SparseMatrix& A) {
  const SparseMatrix AB = A * B;
  SparseMatrix M = SparseMatrix(B.transpose()) * AB;
  SparseMatrix Mt = M.transpose();
  M = 0.5 * (M + Mt);
  M.prune(0.0);
  return M;
}

}  // namespace

LocalSnapshots local_snapshot_basis(const CoarseGrid& coarse, const Neighborhood& nb,
                                    const CellField& a, const CellField& b) {
  const BlockExtension first(coarse, nb.coarse_cells[0], a, b);
  const BlockExtension second(coarse, nb.coarse_cells[1], a, b);
  return stitch(nb, first, second);
}

SnapshotSpace build_snapshot_space(const CoarseGrid& coarse, const CellField& a, const CellField& b) {
  const FineGrid& fine = coarse.fine();
  if (!a.matches(fine) || !b.matches(fine)) {
    throw Error(ErrorKind::DimensionMismatch, "coefficient fields do not match the fine grid");
  }
  std::vector<BlockExtension> blocks;
  blocks.reserve(static_cast<std::size_t>(coarse.num_cells()));
  for (int K = 0; K < coarse.num_cells(); ++K) blocks.emplace_back(coarse, K, a, b);

  SnapshotSpace space;
  const int ne = coarse.num_interior_edges();
  space.neighborhoods.reserve(static_cast<std::size_t>(ne));
  space.locals.reserve(static_cast<std::size_t>(ne));
  int offset = 0;
  std::vector<Eigen::Triplet<double>> trip;
  for (int i = 0; i < ne; ++i) {
    Neighborhood nb = neighborhood_at(coarse, i);
    LocalSnapshots ls = stitch(nb, blocks[static_cast<std::size_t>(nb.coarse_cells[0])],
                               blocks[static_cast<std::size_t>(nb.coarse_cells[1])]);
    for (int j = 0; j < ls.count(); ++j)
      for (std::size_t k = 0; k < ls.edges.size(); ++k) {
        const double v = ls.values(static_cast<Eigen::Index>(k), j);
        if (v != 0.0) trip.emplace_back(ls.edges[k], offset + j, v);
      }
    space.blocks.push_back({offset, ls.count()});
    offset += ls.count();
    space.neighborhoods.push_back(std::move(nb));
    space.locals.push_back(std::move(ls));
  }
  space.basis.resize(fine.num_edges(), offset);
  space.basis.setFromTriplets(trip.begin(), trip.end());
  return space;
}

GalerkinSolution solve_in_space(const SparseMatrix& basis, const SparseMatrix& A, const Vector& F) {
  if (basis.rows() != A.rows() || A.rows() != F.size()) {
    throw Error(ErrorKind::DimensionMismatch, "solve_in_space: basis/system size mismatch");
  }
  const SparseMatrix M = symmetric_projection(basis, A);
  const Vector rhs = basis.transpose() * F;
  SystemSolution sol = solve_projected(M, rhs);
  GalerkinSolution out;
  out.u = basis * sol.coefficients;
  out.coefficients = std::move(sol.coefficients);
  out.rank = sol.rank;
  return out;
}

namespace {

SnapshotProblem finish_problem(const SnapshotSpace& space, SparseMatrix gram, const SparseMatrix& l2_mass,
                               const Vector& F) {
  SnapshotProblem p;
  p.gram = std::move(gram);
  p.l2_gram = symmetric_projection(space.basis, l2_mass);
  p.load = space.basis.transpose() * F;
  p.snap_coeffs = solve_projected(p.gram, p.load).coefficients;
  p.snap_energy2 = p.snap_coeffs.dot(p.gram * p.snap_coeffs);
  p.snap_l2_2 = p.snap_coeffs.dot(p.l2_gram * p.snap_coeffs);
  return p;
}

}  // namespace

SnapshotProblem build_snapshot_problem(const SnapshotSpace& space, const SparseMatrix& A,
                                       const SparseMatrix& l2_mass, const Vector& F) {
  return finish_problem(space, symmetric_projection(space.basis, A), l2_mass, F);
}

SnapshotProblem build_snapshot_problem(const SnapshotSpace& space, const SparseMatrix& curl_factor,
                                       const SparseMatrix& mass, const SparseMatrix& l2_mass, const Vector& F) {
  const SparseMatrix CB = curl_factor * space.basis;
  SparseMatrix gram = SparseMatrix(CB.transpose()) * CB + symmetric_projection(space.basis, mass);
  gram.prune(0.0);
  return finish_problem(space, std::move(gram), l2_mass, F);
}

Matrix gram_block(const SparseMatrix& gram, const std::vector<int>& columns) {
  const auto m = static_cast<Eigen::Index>(columns.size());
  Matrix out = Matrix::Zero(m, m);
  if (m == 0) return out;
  const auto [lo, hi] = std::minmax_element(columns.begin(), columns.end());
  std::vector<int> pos(static_cast<std::size_t>(*hi - *lo + 1), -1);
  for (Eigen::Index k = 0; k < m; ++k) pos[static_cast<std::size_t>(columns[static_cast<std::size_t>(k)] - *lo)] = static_cast<int>(k);
  for (Eigen::Index k = 0; k < m; ++k) {
    for (SparseMatrix::InnerIterator it(gram, columns[static_cast<std::size_t>(k)]); it; ++it) {
      const auto row = static_cast<int>(it.row());
      if (row < *lo || row > *hi) continue;
      const int r = pos[static_cast<std::size_t>(row - *lo)];
      if (r >= 0) out(r, k) = it.value();
    }
  }
  return out;
}

}  // namespace hcms
