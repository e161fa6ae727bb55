#ifndef HCMS_ERROR_HPP
#define HCMS_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace hcms {

/// Failure classes surfaced by the library. The CLI maps each class to an
/// exit code and prints its name so scripts can react to it.
enum class ErrorKind {
  InvalidMesh,
  IncompatibleGrids,
  NotInterior,
  DimensionMismatch,
  Parse,
  InvalidArgument,
  Factorization,
  NonConvergence,
  Io,
  Config,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidMesh: return "invalid-mesh";
    case ErrorKind::IncompatibleGrids: return "incompatible-grids";
    case ErrorKind::NotInterior: return "not-interior";
    case ErrorKind::DimensionMismatch: return "dimension-mismatch";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::Factorization: return "factorization";
    case ErrorKind::NonConvergence: return "non-convergence";
    case ErrorKind::Io: return "io";
    case ErrorKind::Config: return "config";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace hcms

#endif  // HCMS_ERROR_HPP
