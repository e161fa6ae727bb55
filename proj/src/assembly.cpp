#include "hcms/assembly.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "hcms/error.hpp"

namespace hcms {

namespace {

void require_match(const FineGrid& grid, const CellField& field, const char* name) {
  if (!field.matches(grid)) {
    throw Error(ErrorKind::DimensionMismatch,
                std::string(name) + " field does not match the fine grid");
  }
}

using Triplets = std::vector<Eigen::Triplet<double>>;

}  // namespace

ElementMatrices element_matrices(double h, double a, double b) {
  const Eigen::Vector4d s(1.0, -1.0, -1.0, 1.0);
  ElementMatrices em;
  em.curl = (a / (h * h)) * (s * s.transpose());
  em.mass.setZero();
  const double diag = b / 3.0;
  const double off = b / 6.0;
  em.mass(0, 0) = em.mass(1, 1) = em.mass(2, 2) = em.mass(3, 3) = diag;
  em.mass(0, 1) = em.mass(1, 0) = off;
  em.mass(2, 3) = em.mass(3, 2) = off;
  return em;
}

GlobalMatrices assemble_global(const FineGrid& grid, const CellField& a, const CellField& b) {
  require_match(grid, a, "a");
  require_match(grid, b, "b");
  const int ne = grid.num_edges();
  Triplets curl;
  Triplets mass;
  curl.reserve(static_cast<std::size_t>(grid.num_cells()) * 16);
  mass.reserve(static_cast<std::size_t>(grid.num_cells()) * 8);
  for (int c = 0; c < grid.num_cells(); ++c) {
    const auto em = element_matrices(grid.h(), a[c], b[c]);
    const auto edges = grid.cell_edges(c);
    for (int p = 0; p < 4; ++p)
      for (int q = 0; q < 4; ++q) {
        curl.emplace_back(edges[p], edges[q], em.curl(p, q));
        if (em.mass(p, q) != 0.0) mass.emplace_back(edges[p], edges[q], em.mass(p, q));
      }
  }
  GlobalMatrices g;
  g.curl.resize(ne, ne);
  g.mass.resize(ne, ne);
  g.curl.setFromTriplets(curl.begin(), curl.end());
  g.mass.setFromTriplets(mass.begin(), mass.end());
  return g;
}

SparseMatrix curl_factor(const FineGrid& grid, const CellField& a) {
  require_match(grid, a, "a");
  constexpr std::array<double, 4> sign{1.0, -1.0, -1.0, 1.0};
  Triplets t;
  t.reserve(static_cast<std::size_t>(grid.num_cells()) * 4);
  for (int c = 0; c < grid.num_cells(); ++c) {
    const double w = std::sqrt(a[c]) / grid.h();
    const auto edges = grid.cell_edges(c);
    for (int k = 0; k < 4; ++k) t.emplace_back(c, edges[static_cast<std::size_t>(k)], w * sign[static_cast<std::size_t>(k)]);
  }
  SparseMatrix C(grid.num_cells(), grid.num_edges());
  C.setFromTriplets(t.begin(), t.end());
  return C;
}

SparseMatrix assemble_local(const FineGrid& grid, std::span<const int> cells,
                            std::span<const int> local_edges, const CellField& a,
                            const CellField& b) {
  auto local = [&](int e) {
    const auto it = std::lower_bound(local_edges.begin(), local_edges.end(), e);
    return static_cast<int>(it - local_edges.begin());
  };
  Triplets trip;
  trip.reserve(cells.size() * 16);
  for (int c : cells) {
    const auto em = element_matrices(grid.h(), a[c], b[c]);
    const auto edges = grid.cell_edges(c);
    std::array<int, 4> loc{};
    for (int p = 0; p < 4; ++p) loc[p] = local(edges[p]);
    for (int p = 0; p < 4; ++p)
      for (int q = 0; q < 4; ++q) trip.emplace_back(loc[p], loc[q], em.curl(p, q) + em.mass(p, q));
  }
  const auto n = static_cast<Eigen::Index>(local_edges.size());
  SparseMatrix m(n, n);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

Vector assemble_load(const FineGrid& grid, const VectorCellField& f) {
  if (!f.matches(grid)) throw Error(ErrorKind::DimensionMismatch, "source does not match the fine grid");
  Vector F = Vector::Zero(grid.num_edges());
  const double w = 0.5 * grid.h();
  for (int c = 0; c < grid.num_cells(); ++c) {
    const auto edges = grid.cell_edges(c);
    const auto idx = static_cast<std::size_t>(c);
    F[edges[0]] += w * f.f1[idx];
    F[edges[1]] += w * f.f1[idx];
    F[edges[2]] += w * f.f2[idx];
    F[edges[3]] += w * f.f2[idx];
  }
  return F;
}

DofMap::DofMap(const FineGrid& grid) : full_to_reduced_(static_cast<std::size_t>(grid.num_edges()), -1) {
  reduced_to_full_.reserve(static_cast<std::size_t>(grid.num_interior_edges()));
  for (int e = 0; e < grid.num_edges(); ++e) {
    if (grid.is_boundary(e)) continue;
    full_to_reduced_[static_cast<std::size_t>(e)] = static_cast<int>(reduced_to_full_.size());
    reduced_to_full_.push_back(e);
  }
}

Vector DofMap::expand(const Vector& reduced) const {
  Vector full = Vector::Zero(num_full());
  for (int k = 0; k < num_reduced(); ++k) full[this->full(k)] = reduced[k];
  return full;
}

Vector DofMap::restrict_to_interior(const Vector& full) const {
  Vector r(num_reduced());
  for (int k = 0; k < num_reduced(); ++k) r[k] = full[this->full(k)];
  return r;
}

ReducedSystem apply_essential_bc(const SparseMatrix& A, const Vector& F, const FineGrid& grid) {
  DofMap map(grid);
  if (A.rows() != map.num_full() || F.size() != map.num_full()) {
    throw Error(ErrorKind::DimensionMismatch, "system size does not match the fine grid");
  }
  Triplets trip;
  trip.reserve(static_cast<std::size_t>(A.nonZeros()));
  for (int col = 0; col < A.outerSize(); ++col) {
    const int rc = map.reduced(col);
    if (rc < 0) continue;
    for (SparseMatrix::InnerIterator it(A, col); it; ++it) {
      const int rr = map.reduced(static_cast<int>(it.row()));
      if (rr >= 0) trip.emplace_back(rr, rc, it.value());
    }
  }
  SparseMatrix Ar(map.num_reduced(), map.num_reduced());
  Ar.setFromTriplets(trip.begin(), trip.end());
  Vector Fr = map.restrict_to_interior(F);
  return {std::move(Ar), std::move(Fr), std::move(map)};
}

Norms weighted_norms(const FineGrid& grid, const Vector& v, std::span<const int> cells,
                     const CellField& a, const CellField& b) {
  double curl2 = 0.0;
  double l2b2 = 0.0;
  double l22 = 0.0;
  const auto unit = element_matrices(grid.h(), 1.0, 1.0);
  for (int c : cells) {
    const auto edges = grid.cell_edges(c);
    const Eigen::Vector4d loc(v[edges[0]], v[edges[1]], v[edges[2]], v[edges[3]]);
    const double cq = loc.dot(unit.curl * loc);
    const double mq = loc.dot(unit.mass * loc);
    curl2 += a[c] * cq;
    l2b2 += b[c] * mq;
    l22 += mq;
  }
  Norms n;
  n.curl = std::sqrt(std::max(curl2, 0.0));
  n.l2b = std::sqrt(std::max(l2b2, 0.0));
  n.l2 = std::sqrt(std::max(l22, 0.0));
  n.energy = std::sqrt(std::max(curl2 + l2b2, 0.0));
  return n;
}

Norms weighted_norms(const FineGrid& grid, const Vector& v, const CellField& a, const CellField& b) {
  std::vector<int> all(static_cast<std::size_t>(grid.num_cells()));
  for (int c = 0; c < grid.num_cells(); ++c) all[static_cast<std::size_t>(c)] = c;
  return weighted_norms(grid, v, all, a, b);
}

SparseMatrix discrete_gradient(const FineGrid& grid) {
  const auto nodes = grid.interior_nodes();
  std::vector<int> column(static_cast<std::size_t>(grid.num_nodes()), -1);
  for (std::size_t k = 0; k < nodes.size(); ++k) column[static_cast<std::size_t>(nodes[k])] = static_cast<int>(k);
  Triplets trip;
  trip.reserve(static_cast<std::size_t>(grid.num_edges()) * 2);
  for (int e = 0; e < grid.num_edges(); ++e) {
    const auto [tail, head] = grid.edge_nodes(e);
    if (const int ct = column[static_cast<std::size_t>(tail)]; ct >= 0) trip.emplace_back(e, ct, -1.0);
    if (const int ch = column[static_cast<std::size_t>(head)]; ch >= 0) trip.emplace_back(e, ch, 1.0);
  }
  SparseMatrix G(grid.num_edges(), static_cast<Eigen::Index>(nodes.size()));
  G.setFromTriplets(trip.begin(), trip.end());
  return G;
}

void write_triplets(const SparseMatrix& m, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot open " + path.string() + " for writing");
  out << "# " << m.rows() << ' ' << m.cols() << ' ' << m.nonZeros() << '\n';
  char buf[64];
  for (int col = 0; col < m.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(m, col); it; ++it) {
      std::snprintf(buf, sizeof buf, "%.17g", it.value());
      out << it.row() << ' ' << it.col() << ' ' << buf << '\n';
    }
  if (!out) throw Error(ErrorKind::Io, "failed writing " + path.string());
}

}  // namespace hcms
