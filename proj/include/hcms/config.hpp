#ifndef HCMS_CONFIG_HPP
#define HCMS_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hcms/adaptive.hpp"
#include "hcms/fields.hpp"

namespace hcms {

/// Everything a run needs. Text form is one `key = value` per line; `#`
/// starts a comment. Keys are listed by RunConfig::keys().
struct RunConfig {
  int n = 64;
  int N = 8;
  double p = 4;
  ContrastPattern pattern = ContrastPattern::Inclusions;
  std::uint64_t seed = 1;
  double density = 0.2;
  double kappa0 = 10;
  std::string kappa_file;  ///< raster; overrides the generated field
  int example = 1;
  double b = 1;
  std::string b_file;      ///< raster; overrides the constant b

  double theta = 0.2;
  std::optional<double> delta0;       ///< unset: 0.7 (example 1), 0.5 (example 2)
  double delta = 0.5;
  double percentage = 0.25;
  std::optional<int> initial_number;  ///< unset: 1 (example 1), 2 (example 2)
  int online_iterations = 4;
  double stop_tol = 1e-10;
  int dof_cap = 0;
  int max_iterations = 1000;
  int uniform_levels = 4;

  std::vector<int> coarse_list{4, 8, 16};
  std::vector<double> p_list{2, 4, 6};

  std::string output_dir = ".";
  bool timing = true;
  bool dump = false;  ///< also write matrices and bases

  static const std::vector<std::string>& keys();

  /// Throws Config on an unknown key, Parse on a malformed value.
  void set(const std::string& key, const std::string& value);
  std::string get(const std::string& key) const;

  double effective_delta0() const;
  int effective_initial_number() const;
  AdaptiveConfig adaptive() const;

  /// Throws Config when a value is out of range or n is not a multiple of N.
  void validate() const;
};

RunConfig load_config(const std::filesystem::path& path);
void parse_config(std::istream& in, RunConfig& config);
void print_config(const RunConfig& config, std::ostream& out);

}  // namespace hcms

#endif  // HCMS_CONFIG_HPP
