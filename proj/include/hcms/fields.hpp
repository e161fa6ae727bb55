#ifndef HCMS_FIELDS_HPP
#define HCMS_FIELDS_HPP

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "hcms/grid.hpp"

namespace hcms {

/// One scalar per fine cell, indexed like FineGrid cells.
class CellField {
 public:
  CellField(int n, double value);
  CellField(int n, std::vector<double> values);

  int n() const noexcept { return n_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](int c) const noexcept { return values_[static_cast<std::size_t>(c)]; }
  double& operator[](int c) noexcept { return values_[static_cast<std::size_t>(c)]; }
  std::span<const double> values() const noexcept { return values_; }

  double min() const;
  double max() const;
  bool matches(const FineGrid& grid) const noexcept { return grid.n() == n_; }

  friend bool operator==(const CellField&, const CellField&) = default;

 private:
  int n_;
  std::vector<double> values_;
};

/// Source f = (f1, f2) sampled at fine cell midpoints.
struct VectorCellField {
  int n = 0;
  std::vector<double> f1;
  std::vector<double> f2;

  bool matches(const FineGrid& grid) const noexcept {
    return grid.n() == n && f1.size() == static_cast<std::size_t>(n) * n && f2.size() == f1.size();
  }
};

/// The two piecewise-constant benchmark sources (id 1 or 2).
VectorCellField example_source(int id, const FineGrid& grid);

enum class ContrastPattern { Inclusions, Channels, Checker };

ContrastPattern parse_pattern(std::string_view name);
std::string_view to_string(ContrastPattern pattern);

struct ContrastOptions {
  ContrastPattern pattern = ContrastPattern::Inclusions;
  std::uint64_t seed = 1;
  double background = 1.0;
  double value = 10.0;
  double density = 0.2;  ///< target fraction of high-value cells (random patterns)
};

/// Two-valued field {background, value}; deterministic for a given seed.
CellField generate_contrast_field(const FineGrid& grid, const ContrastOptions& options);

/// Cellwise kappa^p.
CellField contrast_power(const CellField& kappa, double p);

/// Plain-text raster: a header line "nx ny" followed by ny rows of nx values.
/// Row j lists cells (0..nx-1, j), bottom row first.
void write_raster(const CellField& field, const std::filesystem::path& path);
CellField read_raster(const std::filesystem::path& path, int expected_n);

}  // namespace hcms

#endif  // HCMS_FIELDS_HPP
