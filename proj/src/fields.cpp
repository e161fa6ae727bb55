#include "hcms/fields.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "hcms/error.hpp"

namespace hcms {

CellField::CellField(int n, double value)
    : n_(n), values_(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), value) {}

CellField::CellField(int n, std::vector<double> values) : n_(n), values_(std::move(values)) {
  if (values_.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(n)) {
    throw Error(ErrorKind::DimensionMismatch, "cell field for n=" + std::to_string(n) + " needs " +
                                                  std::to_string(n * n) + " values, got " +
                                                  std::to_string(values_.size()));
  }
}

double CellField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double CellField::max() const { return *std::max_element(values_.begin(), values_.end()); }

namespace {

double example1_f1(double y) {
  if (0.1 < y && y < 0.2) return 100.0;
  if (0.4 < y && y < 0.45) return 10000.0;
  return 1.0;
}

double example1_f2(double x) {
  if (0.2 < x && x < 0.25) return -200.0;
  if (0.65 < x && x < 0.75) return 1500.0;
  return 5.0;
}

// Diagonal coordinates are formed from integer cell offsets so that cells on
// the same diagonal classify identically; this keeps the sampled field
// discretely divergence-free.
std::array<double, 2> example2(int i, int j, int n) {
  const double diff = static_cast<double>(i - j) / n;      // x - y
  const double sum = static_cast<double>(i + j + 1) / n;   // x + y
  if (diff <= -0.6) return {10.0, 10.0};
  if (diff >= 0.6) return {-2.0, -2.0};
  if (sum <= 0.4) return {200.0, -200.0};
  if (sum >= 1.6) return {100.0, -100.0};
  return {0.0, 0.0};
}

// Portable draws: only the raw mt19937_64 stream is standardized.
class Draw {
 public:
  explicit Draw(std::uint64_t seed) : engine_(seed) {}
  int below(int m) { return static_cast<int>(engine_() % static_cast<std::uint64_t>(m)); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace

VectorCellField example_source(int id, const FineGrid& grid) {
  if (id != 1 && id != 2) {
    throw Error(ErrorKind::InvalidArgument, "unknown example source id " + std::to_string(id));
  }
  const int n = grid.n();
  VectorCellField f{n, std::vector<double>(static_cast<std::size_t>(n * n)),
                    std::vector<double>(static_cast<std::size_t>(n * n))};
  for (int c = 0; c < grid.num_cells(); ++c) {
    const auto c_idx = static_cast<std::size_t>(c);
    if (id == 1) {
      const auto [x, y] = grid.cell_midpoint(c);
      f.f1[c_idx] = example1_f1(y);
      f.f2[c_idx] = example1_f2(x);
    } else {
      const auto v = example2(grid.cell_i(c), grid.cell_j(c), n);
      f.f1[c_idx] = v[0];
      f.f2[c_idx] = v[1];
    }
  }
  return f;
}

ContrastPattern parse_pattern(std::string_view name) {
  if (name == "inclusions") return ContrastPattern::Inclusions;
  if (name == "channels") return ContrastPattern::Channels;
  if (name == "checker") return ContrastPattern::Checker;
  throw Error(ErrorKind::InvalidArgument, "unknown contrast pattern '" + std::string(name) + "'");
}

std::string_view to_string(ContrastPattern pattern) {
  switch (pattern) {
    case ContrastPattern::Inclusions: return "inclusions";
    case ContrastPattern::Channels: return "channels";
    case ContrastPattern::Checker: return "checker";
  }
  return "unknown";
}

CellField generate_contrast_field(const FineGrid& grid, const ContrastOptions& options) {
  if (!(options.value > options.background)) {
    throw Error(ErrorKind::InvalidArgument, "contrast value must exceed the background");
  }
  if (options.density < 0.0 || options.density > 1.0) {
    throw Error(ErrorKind::InvalidArgument, "density must lie in [0, 1]");
  }
  const int n = grid.n();
  CellField field(n, options.background);

  if (options.pattern == ContrastPattern::Checker) {
    for (int c = 0; c < grid.num_cells(); ++c)
      if ((grid.cell_i(c) + grid.cell_j(c)) % 2 == 1) field[c] = options.value;
    return field;
  }

  const auto target = static_cast<long>(std::ceil(options.density * grid.num_cells()));
  long high = 0;
  auto paint = [&](int i0, int j0, int wi, int wj) {
    for (int j = j0; j < std::min(n, j0 + wj); ++j)
      for (int i = i0; i < std::min(n, i0 + wi); ++i) {
        const int c = grid.cell(i, j);
        if (field[c] != options.value) {
          field[c] = options.value;
          ++high;
        }
      }
  };

  Draw draw(options.seed);
  if (options.pattern == ContrastPattern::Inclusions) {
    const int max_side = std::max(1, n / 32) + 1;
    while (high < target) {
      const int i0 = draw.below(n);
      const int j0 = draw.below(n);
      const int side = 1 + draw.below(max_side);
      paint(i0, j0, side, side);
    }
  } else {
    const int max_width = std::max(1, n / 64);
    while (high < target) {
      const bool horizontal = draw.below(2) == 0;
      const int width = 1 + draw.below(max_width);
      const int length = n / 2 + draw.below(n / 2 + 1);
      const int along = draw.below(n - length + 1);
      const int across = draw.below(n - width + 1);
      if (horizontal)
        paint(along, across, length, width);
      else
        paint(across, along, width, length);
    }
  }
  return field;
}

CellField contrast_power(const CellField& kappa, double p) {
  std::vector<double> out(kappa.values().begin(), kappa.values().end());
  for (double& v : out) v = std::pow(v, p);
  return CellField(kappa.n(), std::move(out));
}

void write_raster(const CellField& field, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot open " + path.string() + " for writing");
  const int n = field.n();
  out << n << ' ' << n << '\n';
  char buf[32];
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", field[j * n + i]);
      out << (i ? " " : "") << buf;
    }
    out << '\n';
  }
  if (!out) throw Error(ErrorKind::Io, "failed writing " + path.string());
}

CellField read_raster(const std::filesystem::path& path, int expected_n) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());

  std::string line;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos || line[first] == '#') continue;
      return true;
    }
    return false;
  };

  if (!next_line()) throw Error(ErrorKind::Parse, path.string() + ": missing header");
  int nx = 0;
  int ny = 0;
  {
    std::istringstream header(line);
    if (!(header >> nx >> ny)) throw Error(ErrorKind::Parse, path.string() + ": bad header");
  }
  if (nx != expected_n || ny != expected_n) {
    throw Error(ErrorKind::DimensionMismatch,
                path.string() + ": raster is " + std::to_string(nx) + "x" + std::to_string(ny) +
                    ", grid is " + std::to_string(expected_n) + "x" + std::to_string(expected_n));
  }

  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(nx) * ny);
  int rows = 0;
  while (next_line()) {
    std::istringstream row(line);
    std::string token;
    int count = 0;
    while (row >> token) {
      char* end = nullptr;
      const double v = std::strtod(token.c_str(), &end);
      if (end == token.c_str() || *end != '\0') {
        throw Error(ErrorKind::Parse, path.string() + ": bad value '" + token + "'");
      }
      values.push_back(v);
      ++count;
    }
    if (count != nx) {
      throw Error(ErrorKind::DimensionMismatch, path.string() + ": row " + std::to_string(rows) +
                                                    " has " + std::to_string(count) + " values");
    }
    ++rows;
  }
  if (rows != ny) {
    throw Error(ErrorKind::DimensionMismatch,
                path.string() + ": expected " + std::to_string(ny) + " rows, got " + std::to_string(rows));
  }
  return CellField(nx, std::move(values));
}

}  // namespace hcms
