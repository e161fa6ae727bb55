#ifndef HCMS_LINSOLVE_HPP
#define HCMS_LINSOLVE_HPP

#include <string>
#include <vector>

#include "hcms/assembly.hpp"

namespace hcms {

struct SolveReport {
  std::string method;        ///< "cholesky" or "pcg"
  int iterations = 0;        ///< refinement steps or CG iterations
  double relative_residual = 0;
  double backward_error = 0;  ///< ||r|| / (||A|| ||x|| + ||b||)
};

/// Backward error at which a refined Cholesky solution is accepted even if
/// the relative residual misses tol: the residual is then at the rounding
/// level of x itself (||A|| ||x|| eps), which no double solve can beat.
inline constexpr double kBackwardTol = 1e-14;

/// Sparse SPD solve: Cholesky with iterative refinement, falling back to
/// diagonally preconditioned CG. Succeeds when ||A x - rhs|| <= tol ||rhs||,
/// or when the Cholesky solution reaches backward error kBackwardTol;
/// otherwise throws NonConvergence.
Vector solve_spd(const SparseMatrix& A, const Vector& rhs, double tol = 1e-10,
                 SolveReport* report = nullptr);

/// Generalized symmetric eigenpairs A v = lambda S v.
struct EigenPairs {
  Vector values;   ///< ascending, >= 0
  Matrix vectors;  ///< columns S-orthonormal, first significant entry positive
};

EigenPairs gen_eig_sym(const Matrix& A, const Matrix& S);

/// Diagonally pivoted Cholesky of a symmetric PSD matrix that stops once the
/// largest remaining pivot drops below drop_tol * (max diagonal). Solves are
/// restricted to the retained pivots; dropped coordinates come back as zero.
class PivotedCholesky {
 public:
  explicit PivotedCholesky(const Matrix& m, double drop_tol = 1e-12);

  int size() const noexcept { return static_cast<int>(perm_.size()); }
  int rank() const noexcept { return rank_; }
  /// Original indices of the retained pivots, in pivot order.
  std::vector<int> kept() const;

  Vector solve(const Vector& b) const;
  /// b^T M^+ b over the retained subspace.
  double dual_norm2(const Vector& b) const;

 private:
  Vector forward(const Vector& b) const;

  Matrix factor_;  // pivoted copy; lower triangle of the leading rank_ block is L
  std::vector<int> perm_;
  int rank_ = 0;
};

/// Dense SPD check by Cholesky.
bool is_spd(const Matrix& m);

}  // namespace hcms

#endif  // HCMS_LINSOLVE_HPP
