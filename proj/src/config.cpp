#include "hcms/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "hcms/error.hpp"

namespace hcms {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw Error(ErrorKind::Parse, "bad value '" + text + "' for " + key);
  }
  return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw Error(ErrorKind::Parse, "bad boolean '" + text + "' for " + key);
}

template <typename T>
std::vector<T> parse_list(const std::string& key, const std::string& text) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number<T>(key, trim(item)));
  if (out.empty()) throw Error(ErrorKind::Parse, "empty list for " + key);
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename T>
std::string join(const std::vector<T>& values) {
  std::string out;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k) out += ',';
    if constexpr (std::is_floating_point_v<T>)
      out += fmt(values[k]);
    else
      out += std::to_string(values[k]);
  }
  return out;
}

}  // namespace

const std::vector<std::string>& RunConfig::keys() {
  static const std::vector<std::string> k{
      "n", "N", "p", "pattern", "seed", "density", "kappa0", "kappa_file", "example", "b", "b_file",
      "theta", "delta0", "delta", "percentage", "initial_number", "online_iterations", "stop_tol",
      "dof_cap", "max_iterations", "uniform_levels", "coarse_list", "p_list", "output_dir", "timing", "dump"};
  return k;
}

void RunConfig::set(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (key == "n") n = parse_number<int>(key, v);
  else if (key == "N") N = parse_number<int>(key, v);
  else if (key == "p") p = parse_number<double>(key, v);
  else if (key == "pattern") {
    try {
      pattern = parse_pattern(v);
    } catch (const Error& e) {
      throw Error(ErrorKind::Parse, e.what());
    }
  }
  else if (key == "seed") seed = parse_number<std::uint64_t>(key, v);
  else if (key == "density") density = parse_number<double>(key, v);
  else if (key == "kappa0") kappa0 = parse_number<double>(key, v);
  else if (key == "kappa_file") kappa_file = v;
  else if (key == "example") example = parse_number<int>(key, v);
  else if (key == "b") b = parse_number<double>(key, v);
  else if (key == "b_file") b_file = v;
  else if (key == "theta") theta = parse_number<double>(key, v);
  else if (key == "delta0") delta0 = v == "auto" ? std::nullopt : std::optional(parse_number<double>(key, v));
  else if (key == "delta") delta = parse_number<double>(key, v);
  else if (key == "percentage") percentage = parse_number<double>(key, v);
  else if (key == "initial_number")
    initial_number = v == "auto" ? std::nullopt : std::optional(parse_number<int>(key, v));
  else if (key == "online_iterations") online_iterations = parse_number<int>(key, v);
  else if (key == "stop_tol") stop_tol = parse_number<double>(key, v);
  else if (key == "dof_cap") dof_cap = parse_number<int>(key, v);
  else if (key == "max_iterations") max_iterations = parse_number<int>(key, v);
  else if (key == "uniform_levels") uniform_levels = parse_number<int>(key, v);
  else if (key == "coarse_list") coarse_list = parse_list<int>(key, v);
  else if (key == "p_list") p_list = parse_list<double>(key, v);
  else if (key == "output_dir") output_dir = v;
  else if (key == "timing") timing = parse_bool(key, v);
  else if (key == "dump") dump = parse_bool(key, v);
  else throw Error(ErrorKind::Config, "unknown key '" + key + "'");
}

std::string RunConfig::get(const std::string& key) const {
  if (key == "n") return std::to_string(n);
  if (key == "N") return std::to_string(N);
  if (key == "p") return fmt(p);
  if (key == "pattern") return std::string(to_string(pattern));
  if (key == "seed") return std::to_string(seed);
  if (key == "density") return fmt(density);
  if (key == "kappa0") return fmt(kappa0);
  if (key == "kappa_file") return kappa_file;
  if (key == "example") return std::to_string(example);
  if (key == "b") return fmt(b);
  if (key == "b_file") return b_file;
  if (key == "theta") return fmt(theta);
  if (key == "delta0") return delta0 ? fmt(*delta0) : "auto";
  if (key == "delta") return fmt(delta);
  if (key == "percentage") return fmt(percentage);
  if (key == "initial_number") return initial_number ? std::to_string(*initial_number) : "auto";
  if (key == "online_iterations") return std::to_string(online_iterations);
  if (key == "stop_tol") return fmt(stop_tol);
  if (key == "dof_cap") return std::to_string(dof_cap);
  if (key == "max_iterations") return std::to_string(max_iterations);
  if (key == "uniform_levels") return std::to_string(uniform_levels);
  if (key == "coarse_list") return join(coarse_list);
  if (key == "p_list") return join(p_list);
  if (key == "output_dir") return output_dir;
  if (key == "timing") return timing ? "true" : "false";
  if (key == "dump") return dump ? "true" : "false";
  throw Error(ErrorKind::Config, "unknown key '" + key + "'");
}

double RunConfig::effective_delta0() const {
  return delta0.value_or(example == 2 ? 0.5 : 0.7);
}

int RunConfig::effective_initial_number() const {
  return initial_number.value_or(example == 2 ? 2 : 1);
}

AdaptiveConfig RunConfig::adaptive() const {
  AdaptiveConfig c;
  c.theta = theta;
  c.delta0 = effective_delta0();
  c.delta = delta;
  c.percentage = percentage;
  c.initial_number = effective_initial_number();
  c.online_iterations = online_iterations;
  c.stop_tol = stop_tol;
  c.dof_cap = dof_cap;
  c.max_iterations = max_iterations;
  c.uniform_levels = uniform_levels;
  c.record_timing = timing;
  return c;
}

void RunConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::Config, msg); };
  if (n < 2) fail("n must be >= 2");
  if (N < 1 || n % N != 0) fail("N must divide n (n=" + std::to_string(n) + ", N=" + std::to_string(N) + ")");
  for (int c : coarse_list)
    if (c < 1) fail("coarse_list entries must be positive");
  if (!(p > 0)) fail("p must be positive");
  for (double q : p_list)
    if (!(q > 0)) fail("p_list entries must be positive");
  if (!(kappa0 > 1)) fail("kappa0 must exceed the background value 1");
  if (!(density >= 0 && density <= 1)) fail("density must lie in [0, 1]");
  if (example != 1 && example != 2) fail("example must be 1 or 2");
  if (!(b > 0)) fail("b must be positive");
  adaptive().validate();
}

void parse_config(std::istream& in, RunConfig& config) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::Parse, "line " + std::to_string(lineno) + ": expected key = value");
    }
    config.set(trim(line.substr(0, eq)), line.substr(eq + 1));
  }
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open config " + path.string());
  RunConfig config;
  parse_config(in, config);
  return config;
}

void print_config(const RunConfig& config, std::ostream& out) {
  for (const auto& key : RunConfig::keys()) out << key << " = " << config.get(key) << '\n';
}

}  // namespace hcms
