#include "hcms/offline.hpp"

#include <cstdio>
#include <fstream>
#include <string>

#include "hcms/error.hpp"

namespace hcms {

double SpectralEntry::lambda(int k) const {
  if (k == size() + 1) return std::numeric_limits<double>::infinity();
  if (k < 1 || k > size()) throw Error(ErrorKind::InvalidArgument, "eigenvalue index out of range");
  return pairs.values[k - 1];
}

SpectralEntry local_spectral(const CoarseGrid& coarse, const Neighborhood& nb,
                             const LocalSnapshots& snapshots, const CellField& a, const CellField& b) {
  const FineGrid& fine = coarse.fine();
  const int J = snapshots.count();
  SpectralEntry entry;

  // Trace values are coefficient / h; the b-weighted edge integral of a
  // product therefore contributes avg(b) * coeff_j * coeff_k / h.
  entry.a = Matrix::Zero(J, J);
  for (int e : nb.trace_edges) {
    const auto cells = fine.edge_cells(e);
    const double bavg = 0.5 * (b[cells[0]] + b[cells[1]]);
    const auto row = snapshots.values.row(nb.local_of(e));
    entry.a.noalias() += (bavg / fine.h()) * (row.transpose() * row);
  }

  const SparseMatrix local = assemble_local(fine, nb.fine_cells, nb.local_edges, a, b);
  const Matrix gram = snapshots.values.transpose() * (local * snapshots.values);
  entry.s = (0.5 / coarse.H()) * (gram + gram.transpose());

  entry.pairs = gen_eig_sym(entry.a, entry.s);
  return entry;
}

SpectralData compute_spectral(const CoarseGrid& coarse, const SnapshotSpace& space, const CellField& a,
                              const CellField& b) {
  SpectralData data;
  data.reserve(space.neighborhoods.size());
  for (std::size_t i = 0; i < space.neighborhoods.size(); ++i)
    data.push_back(local_spectral(coarse, space.neighborhoods[i], space.locals[i], a, b));
  return data;
}

OfflineSelection select_offline(const SpectralEntry& entry, const LocalSnapshots& snapshots, int l) {
  if (l < 0 || l > entry.size()) {
    throw Error(ErrorKind::InvalidArgument, "offline count " + std::to_string(l) + " outside [0, " +
                                                std::to_string(entry.size()) + "]");
  }
  OfflineSelection sel;
  sel.coefficients = entry.pairs.vectors.leftCols(l);
  sel.fine = snapshots.values * sel.coefficients;
  sel.next_lambda = entry.lambda(l + 1);
  return sel;
}

MultiscaleSpace::MultiscaleSpace(std::shared_ptr<const SpectralData> spectral, std::vector<BlockRange> blocks,
                                 int initial_number)
    : spectral_(std::move(spectral)), blocks_(std::move(blocks)) {
  if (!spectral_ || spectral_->size() != blocks_.size()) {
    throw Error(ErrorKind::DimensionMismatch, "spectral data and snapshot blocks disagree");
  }
  if (initial_number < 0) throw Error(ErrorKind::InvalidArgument, "initial number must be >= 0");
  counts_.resize(blocks_.size());
  for (std::size_t i = 0; i < blocks_.size(); ++i)
    counts_[i] = std::min(initial_number, (*spectral_)[i].size());
}

void MultiscaleSpace::set_count(int i, int l) {
  if (l < 0 || l > max_count(i)) {
    throw Error(ErrorKind::InvalidArgument, "offline count " + std::to_string(l) + " out of range for neighbourhood " +
                                                std::to_string(i));
  }
  counts_[static_cast<std::size_t>(i)] = l;
}

double MultiscaleSpace::next_lambda(int i) const {
  return (*spectral_)[static_cast<std::size_t>(i)].lambda(count(i) + 1);
}

void MultiscaleSpace::add_online(Vector snapshot_coefficients) {
  const int dim_snap = blocks_.empty() ? 0 : blocks_.back().offset + blocks_.back().count;
  if (snapshot_coefficients.size() != dim_snap) {
    throw Error(ErrorKind::DimensionMismatch, "online vector has wrong length");
  }
  online_.push_back(std::move(snapshot_coefficients));
}

int MultiscaleSpace::num_offline() const noexcept {
  int total = 0;
  for (int l : counts_) total += l;
  return total;
}

BlockRange MultiscaleSpace::offline_block(int i) const {
  int offset = 0;
  for (int k = 0; k < i; ++k) offset += counts_[static_cast<std::size_t>(k)];
  return {offset, count(i)};
}

SparseMatrix MultiscaleSpace::coordinates() const {
  const int dim_snap = blocks_.empty() ? 0 : blocks_.back().offset + blocks_.back().count;
  std::vector<Eigen::Triplet<double>> trip;
  int col = 0;
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    const Matrix& vecs = (*spectral_)[i].pairs.vectors;
    for (int k = 0; k < counts_[i]; ++k, ++col)
      for (int r = 0; r < blocks_[i].count; ++r) {
        const double v = vecs(r, k);
        if (v != 0.0) trip.emplace_back(blocks_[i].offset + r, col, v);
      }
  }
  for (const Vector& v : online_) {
    for (Eigen::Index r = 0; r < v.size(); ++r)
      if (v[r] != 0.0) trip.emplace_back(static_cast<int>(r), col, v[r]);
    ++col;
  }
  SparseMatrix P(dim_snap, col);
  P.setFromTriplets(trip.begin(), trip.end());
  return P;
}

SparseMatrix MultiscaleSpace::fine_basis(const SnapshotSpace& snapshots) const {
  return snapshots.basis * coordinates();
}

MsSolution solve_gmsfem(const MultiscaleSpace& space, const SnapshotProblem& problem) {
  if (space.dim() == 0) throw Error(ErrorKind::InvalidArgument, "multiscale space is empty");
  const SparseMatrix P = space.coordinates();
  GalerkinSolution g = solve_in_space(P, problem.gram, problem.load);
  return {std::move(g.coefficients), std::move(g.u), g.rank};
}

void write_eigenvalue_report(const SpectralData& spectral, const SnapshotSpace& space,
                             const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot open " + path.string() + " for writing");
  int width = 0;
  for (const auto& e : spectral) width = std::max(width, e.size());
  out << "neighborhood,coarse_edge";
  for (int k = 1; k <= width; ++k) out << ",lambda_" << k;
  out << '\n';
  char buf[32];
  for (std::size_t i = 0; i < spectral.size(); ++i) {
    out << i << ',' << space.neighborhoods[i].coarse_edge;
    for (int k = 0; k < spectral[i].size(); ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", spectral[i].pairs.values[k]);
      out << ',' << buf;
    }
    out << '\n';
  }
  if (!out) throw Error(ErrorKind::Io, "failed writing " + path.string());
}

}  // namespace hcms
