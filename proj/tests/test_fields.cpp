#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "hcms/error.hpp"
#include "hcms/fields.hpp"

using namespace hcms;

namespace {

int cell_at(const FineGrid& g, double x, double y) {
  return g.cell(static_cast<int>(x * g.n()), static_cast<int>(y * g.n()));
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("hcms_test_" + name);
}

}  // namespace

TEST_CASE("example 1 source values") {
  const FineGrid g(40);
  const VectorCellField f = example_source(1, g);
  CHECK(f.matches(g));
  CHECK(f.f1[static_cast<std::size_t>(cell_at(g, 0.5, 0.15))] == 100);
  CHECK(f.f2[static_cast<std::size_t>(cell_at(g, 0.7, 0.5))] == 1500);
  CHECK(f.f1[static_cast<std::size_t>(cell_at(g, 0.5, 0.42))] == 10000);
  CHECK(f.f2[static_cast<std::size_t>(cell_at(g, 0.22, 0.9))] == -200);
  CHECK(f.f1[static_cast<std::size_t>(cell_at(g, 0.5, 0.6))] == 1);
  CHECK(f.f2[static_cast<std::size_t>(cell_at(g, 0.5, 0.6))] == 5);
}

TEST_CASE("example 2 source values") {
  const FineGrid g(20);
  const VectorCellField f = example_source(2, g);
  const auto c = static_cast<std::size_t>(cell_at(g, 0.1, 0.9));
  CHECK(f.f1[c] == 10);
  CHECK(f.f2[c] == 10);
  const auto d = static_cast<std::size_t>(cell_at(g, 0.9, 0.1));
  CHECK(f.f1[d] == -2);
  const auto low = static_cast<std::size_t>(cell_at(g, 0.05, 0.05));
  CHECK(f.f1[low] == 200);
  CHECK(f.f2[low] == -200);
  const auto high = static_cast<std::size_t>(cell_at(g, 0.95, 0.95));
  CHECK(f.f1[high] == 100);
  CHECK(f.f2[high] == -100);
  const auto mid = static_cast<std::size_t>(cell_at(g, 0.5, 0.5));
  CHECK(f.f1[mid] == 0);
}

TEST_CASE("unknown example id") {
  try {
    example_source(3, FineGrid(4));
    FAIL("expected an exception");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidArgument);
  }
}

TEST_CASE("checker pattern") {
  const FineGrid g(4);
  ContrastOptions opt;
  opt.pattern = ContrastPattern::Checker;
  const CellField k = generate_contrast_field(g, opt);
  int high = 0;
  for (int c = 0; c < g.num_cells(); ++c) {
    const bool odd = (g.cell_i(c) + g.cell_j(c)) % 2 == 1;
    CHECK(k[c] == (odd ? 10.0 : 1.0));
    high += k[c] == 10.0;
  }
  CHECK(high == 8);
}

TEST_CASE("random patterns are deterministic and two-valued") {
  const FineGrid g(64);
  for (auto pattern : {ContrastPattern::Inclusions, ContrastPattern::Channels}) {
    ContrastOptions opt;
    opt.pattern = pattern;
    opt.seed = 7;
    const CellField a = generate_contrast_field(g, opt);
    const CellField b = generate_contrast_field(g, opt);
    CHECK(a == b);
    for (double v : a.values()) CHECK((v == 1.0 || v == 10.0));
    opt.seed = 8;
    CHECK_FALSE(generate_contrast_field(g, opt) == a);
  }
}

TEST_CASE("inclusions fraction regression") {
  // Frozen from the generator's first run: seed 1, density 0.2, n = 64.
  const FineGrid g(64);
  ContrastOptions opt;
  const CellField k = generate_contrast_field(g, opt);
  int high = 0;
  for (double v : k.values()) high += v == 10.0;
  CHECK(high == 823);
}

TEST_CASE("contrast generator validates its options") {
  ContrastOptions opt;
  opt.value = 1.0;
  CHECK_THROWS_AS(generate_contrast_field(FineGrid(8), opt), Error);
  opt.value = 10.0;
  opt.density = 1.5;
  CHECK_THROWS_AS(generate_contrast_field(FineGrid(8), opt), Error);
}

TEST_CASE("contrast power") {
  const FineGrid g(8);
  ContrastOptions opt;
  opt.pattern = ContrastPattern::Checker;
  const CellField k = generate_contrast_field(g, opt);
  const CellField a4 = contrast_power(k, 4);
  CHECK(a4.min() == 1.0);
  CHECK(a4.max() == doctest::Approx(1e4));
  CHECK(contrast_power(k, 6).max() == doctest::Approx(1e6));
  const CellField one = contrast_power(CellField(8, 1.0), 2);
  for (double v : one.values()) CHECK(v == 1.0);
  const CellField a2 = contrast_power(k, 2);
  for (int c = 0; c < g.num_cells(); ++c) CHECK(a2[c] <= a4[c]);
}

TEST_CASE("raster round trip") {
  const FineGrid g(16);
  ContrastOptions opt;
  const CellField k = contrast_power(generate_contrast_field(g, opt), 0.37);
  const auto path = temp_file("roundtrip.txt");
  write_raster(k, path);
  CHECK(read_raster(path, 16) == k);
  std::filesystem::remove(path);
}

TEST_CASE("raster layout: value k goes to cell (k mod n, k div n)") {
  const auto path = temp_file("layout.txt");
  {
    std::ofstream out(path);
    out << "4 4\n";
    for (int j = 0; j < 4; ++j) {
      for (int i = 0; i < 4; ++i) out << (j * 4 + i) << ' ';
      out << '\n';
    }
  }
  const CellField f = read_raster(path, 4);
  const FineGrid g(4);
  for (int k = 0; k < 16; ++k) CHECK(f[g.cell(k % 4, k / 4)] == k);
  std::filesystem::remove(path);
}

TEST_CASE("raster errors") {
  const auto path = temp_file("bad.txt");
  auto expect = [&](const std::string& text, ErrorKind kind) {
    {
      std::ofstream out(path);
      out << text;
    }
    try {
      read_raster(path, 2);
      FAIL("expected an exception");
    } catch (const Error& e) {
      CHECK(e.kind() == kind);
    }
  };
  expect("2 2\n1 2\n", ErrorKind::DimensionMismatch);
  expect("2 2\n1 2\n3 4\n5 6\n", ErrorKind::DimensionMismatch);
  expect("2 2\n1 2 3\n3 4\n", ErrorKind::DimensionMismatch);
  expect("3 3\n1 2 3\n", ErrorKind::DimensionMismatch);
  expect("2 2\n1 x\n3 4\n", ErrorKind::Parse);
  std::filesystem::remove(path);
}

TEST_CASE("cell field size check") {
  CHECK_THROWS_AS(CellField(3, std::vector<double>(8, 1.0)), Error);
}
