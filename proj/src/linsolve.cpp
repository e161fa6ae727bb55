#include "hcms/linsolve.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

#include "hcms/error.hpp"

namespace hcms {

namespace {

double relative_residual(const SparseMatrix& A, const Vector& x, const Vector& rhs) {
  const double nb = rhs.norm();
  return (A * x - rhs).norm() / (nb > 0 ? nb : 1.0);
}

// Largest absolute column sum; equals the infinity norm for symmetric A.
double norm1(const SparseMatrix& A) {
  double out = 0.0;
  for (int k = 0; k < A.outerSize(); ++k) {
    double col = 0.0;
    for (SparseMatrix::InnerIterator it(A, k); it; ++it) col += std::abs(it.value());
    out = std::max(out, col);
  }
  return out;
}

// Normwise backward error ||r|| / (||A|| ||x|| + ||b||).
double backward_error(const SparseMatrix& A, double anorm, const Vector& x, const Vector& rhs) {
  return (A * x - rhs).norm() / (anorm * x.norm() + rhs.norm());
}

}  // namespace

Vector solve_spd(const SparseMatrix& A, const Vector& rhs, double tol, SolveReport* report) {
  if (A.rows() != A.cols() || A.rows() != rhs.size()) {
    throw Error(ErrorKind::DimensionMismatch, "solve_spd: matrix/rhs size mismatch");
  }
  SolveReport local;
  SolveReport& rep = report ? *report : local;
  if (rhs.size() == 0 || rhs.norm() == 0.0) {
    rep = {"trivial", 0, 0.0, 0.0};
    return Vector::Zero(rhs.size());
  }

  Eigen::SimplicialLLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>> llt(A);
  if (llt.info() == Eigen::Success) {
    Vector x = llt.solve(rhs);
    double res = relative_residual(A, x, rhs);
    int steps = 0;
    while (res > tol && steps < 5) {
      x += llt.solve(rhs - A * x);
      res = relative_residual(A, x, rhs);
      ++steps;
    }
    const double anorm = norm1(A);
    const double berr = backward_error(A, anorm, x, rhs);
    if (res <= tol || berr <= kBackwardTol) {
      rep = {"cholesky", steps, res, berr};
      return x;
    }
  }

  Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper,
                           Eigen::DiagonalPreconditioner<double>>
      cg;
  cg.setTolerance(tol);
  cg.setMaxIterations(std::max<Eigen::Index>(10 * A.rows(), 1000));
  cg.compute(A);
  Vector x = cg.solve(rhs);
  const double res = relative_residual(A, x, rhs);
  rep = {"pcg", static_cast<int>(cg.iterations()), res, backward_error(A, norm1(A), x, rhs)};
  if (cg.info() != Eigen::Success || !(res <= tol)) {
    std::ostringstream msg;
    msg << "solve_spd: no convergence (n=" << A.rows() << ", cholesky "
        << (llt.info() == Eigen::Success ? "ok" : "failed: matrix not SPD?") << ", pcg iterations "
        << cg.iterations() << ", relative residual " << res << ", tol " << tol << ")";
    throw Error(ErrorKind::NonConvergence, msg.str());
  }
  return x;
}

bool is_spd(const Matrix& m) {
  if (m.rows() != m.cols()) return false;
  Eigen::LLT<Matrix> llt(m);
  return llt.info() == Eigen::Success;
}

EigenPairs gen_eig_sym(const Matrix& A, const Matrix& S) {
  if (A.rows() != A.cols() || S.rows() != S.cols() || A.rows() != S.rows()) {
    throw Error(ErrorKind::DimensionMismatch, "gen_eig_sym: matrices must be square and equal size");
  }
  if (!is_spd(S)) throw Error(ErrorKind::Factorization, "gen_eig_sym: right-hand matrix is not SPD");
  EigenPairs out;
  if (A.rows() == 0) return out;

  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> solver(A, S, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::Factorization, "gen_eig_sym: eigensolver failed");
  }
  out.values = solver.eigenvalues();
  out.vectors = solver.eigenvectors();

  // Roundoff can push eigenvalues of a PSD pencil slightly negative.
  const double scale = std::max(out.values.cwiseAbs().maxCoeff(), 1e-300);
  for (Eigen::Index k = 0; k < out.values.size(); ++k)
    if (out.values[k] < 0 && out.values[k] > -1e-12 * scale) out.values[k] = 0.0;

  for (Eigen::Index j = 0; j < out.vectors.cols(); ++j) {
    auto col = out.vectors.col(j);
    const double cut = 1e-12 * col.cwiseAbs().maxCoeff();
    for (Eigen::Index k = 0; k < col.size(); ++k) {
      if (std::abs(col[k]) > cut) {
        if (col[k] < 0) col = -col;
        break;
      }
    }
  }
  return out;
}

PivotedCholesky::PivotedCholesky(const Matrix& m, double drop_tol) : factor_(m), perm_(static_cast<std::size_t>(m.rows())) {
  if (m.rows() != m.cols()) throw Error(ErrorKind::DimensionMismatch, "PivotedCholesky: matrix not square");
  std::iota(perm_.begin(), perm_.end(), 0);
  const Eigen::Index n = m.rows();
  if (n == 0) return;
  const double max_diag = m.diagonal().maxCoeff();
  if (!(max_diag > 0)) return;
  const double threshold = drop_tol * max_diag;

  Eigen::Index k = 0;
  for (; k < n; ++k) {
    Eigen::Index j = k;
    factor_.diagonal().tail(n - k).maxCoeff(&j);
    j += k;
    if (!(factor_(j, j) > threshold)) break;
    if (j != k) {
      factor_.row(k).swap(factor_.row(j));
      factor_.col(k).swap(factor_.col(j));
      std::swap(perm_[static_cast<std::size_t>(k)], perm_[static_cast<std::size_t>(j)]);
    }
    const double pivot = std::sqrt(factor_(k, k));
    factor_(k, k) = pivot;
    const Eigen::Index rest = n - k - 1;
    if (rest == 0) continue;
    factor_.col(k).tail(rest) /= pivot;
    const Vector v = factor_.col(k).tail(rest);
    factor_.bottomRightCorner(rest, rest).noalias() -= v * v.transpose();
  }
  rank_ = static_cast<int>(k);
}

std::vector<int> PivotedCholesky::kept() const {
  return {perm_.begin(), perm_.begin() + rank_};
}

Vector PivotedCholesky::forward(const Vector& b) const {
  Vector y(rank_);
  for (int k = 0; k < rank_; ++k) y[k] = b[perm_[static_cast<std::size_t>(k)]];
  if (rank_ > 0) {
    factor_.topLeftCorner(rank_, rank_).triangularView<Eigen::Lower>().solveInPlace(y);
  }
  return y;
}

Vector PivotedCholesky::solve(const Vector& b) const {
  if (b.size() != size()) throw Error(ErrorKind::DimensionMismatch, "PivotedCholesky::solve size mismatch");
  Vector y = forward(b);
  if (rank_ > 0) {
    factor_.topLeftCorner(rank_, rank_).triangularView<Eigen::Lower>().transpose().solveInPlace(y);
  }
  Vector x = Vector::Zero(size());
  for (int k = 0; k < rank_; ++k) x[perm_[static_cast<std::size_t>(k)]] = y[k];
  return x;
}

double PivotedCholesky::dual_norm2(const Vector& b) const {
  if (b.size() != size()) throw Error(ErrorKind::DimensionMismatch, "PivotedCholesky::dual_norm2 size mismatch");
  return forward(b).squaredNorm();
}

}  // namespace hcms
