// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "hcms/experiment.hpp"
#include "oracles.hpp"

using namespace hcms;

namespace {

constexpr double kRateLow = 1.7;
constexpr double kRateHigh = 2.5;
constexpr double kContrastSpread = 0.02;
constexpr double kFullSpaceE1 = 1e-7;
constexpr double kDecaySlack = 1e-6;
constexpr double kRieszTol = 1e-8;
constexpr double kPythagorasTol = 1e-6;
constexpr double kQuadratureTol = 1e-12;
constexpr double kLoadOrthTol = 1e-10;
constexpr double kCurlGradTol = 1e-12;
constexpr double kOffDiagTol = 1e-14;
constexpr double kEigenResidualTol = 1e-8;
constexpr int kMinOnlineIterations = 5;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

RunConfig base_config(int n, int N, int example) {
  RunConfig c;
  c.n = n;
  c.N = N;
  c.example = example;
  c.timing = false;
  return c;
}

std::vector<double> rates(const ConvergenceTable& t, std::size_t col) {
  std::vector<double> out;
  for (std::size_t r = 1; r < t.coarse.size(); ++r) out.push_back(t.e1_tilde[r - 1][col] / t.e1_tilde[r][col]);
  return out;
}

Outcome snapshot_rate() {
  RunConfig cfg = base_config(64, 8, 2);
  cfg.coarse_list = {4, 8, 16};
  cfg.p_list = {4};
  const ConvergenceTable t = convergence_study(cfg);
  const auto r = rates(t, 0);
  bool ok = true;
  for (double v : r) ok = ok && v >= kRateLow && v <= kRateHigh;

  cfg.example = 1;
  const auto r1 = rates(convergence_study(cfg), 0);
  std::printf("  info: example 1 source ratios %.3f, %.3f\n", r1[0], r1[1]);
  return {ok, format("example 2, e1~ = %.4f, %.4f, %.4f; ratios %.3f, %.3f in [%.1f, %.1f]", t.e1_tilde[0][0],
                     t.e1_tilde[1][0], t.e1_tilde[2][0], r[0], r[1], kRateLow, kRateHigh)};
}

Outcome contrast_robustness() {
  RunConfig cfg = base_config(64, 8, 1);
  cfg.coarse_list = {8};
  cfg.p_list = {2, 4, 6};
  const ConvergenceTable t = convergence_study(cfg);
  const auto& e = t.e1_tilde[0];
  double spread = 0;
  for (std::size_t i = 0; i < e.size(); ++i)
    for (std::size_t j = 0; j < e.size(); ++j) spread = std::max(spread, std::abs(e[i] - e[j]) / std::min(e[i], e[j]));
  return {spread <= kContrastSpread,
          format("e1~ = %.5f, %.5f, %.5f; max pairwise relative difference %.2e <= %.0e", e[0], e[1], e[2], spread,
                 kContrastSpread)};
}

Outcome full_space() {
  RunConfig cfg = base_config(32, 4, 1);
  cfg.initial_number = 1 << 20;
  const Pipeline pipe(cfg);
  const AdaptiveSolver solver = pipe.solver();
  const AdaptState s = solver.initial_state();
  const IterationRecord row = solver.record(s, 0);
  return {row.dof == pipe.space.dim() && row.e1 <= kFullSpaceE1,
          format("DOF %d of %d, e1 = %.3e <= %.0e", row.dof, pipe.space.dim(), row.e1, kFullSpaceE1)};
}

// Shared runs for the history-based criteria.
struct Runs {
  std::vector<std::unique_ptr<Pipeline>> pipes;
  History online;  // example 1, online only
  AdaptiveComparison cmp[2];
  History coupled[2];
};

Outcome online_decay(Runs& runs) {
  RunConfig cfg = base_config(64, 8, 1);
  cfg.online_iterations = kMinOnlineIterations + 1;
  runs.pipes.push_back(std::make_unique<Pipeline>(cfg));
  const Pipeline& pipe = *runs.pipes.back();
  runs.online = pipe.solver().run_online();
  const History& h = runs.online;
  int steps = 0;
  double worst = -INFINITY;
  for (std::size_t m = 1; m < h.rows.size(); ++m) {
    if (h.rows[m].phase != Phase::Online) continue;
    ++steps;
    const double lhs = h.rows[m].error_energy2;
    const double rhs = h.rows[m - 1].error_energy2 - h.rows[m].online_residual2;
    worst = std::max(worst, (lhs - rhs) / pipe.snapshot.snap_energy2);
  }
  const bool ok = steps >= kMinOnlineIterations && worst <= kDecaySlack && std::isfinite(worst);
  return {ok, format("%d online iterations (need %d), e1 %.3e -> %.3e, max violation %.2e ||u_snap||^2 <= %.0e",
                     steps, kMinOnlineIterations, h.rows.front().e1, h.rows.back().e1, worst, kDecaySlack)};
}

void run_experiments(Runs& runs) {
  for (int ex : {1, 2}) {
    runs.pipes.push_back(std::make_unique<Pipeline>(base_config(64, 8, ex)));
    const Pipeline& pipe = *runs.pipes.back();
    runs.cmp[ex - 1] = adaptive_vs_uniform(pipe);
    runs.coupled[ex - 1] = offline_online_experiment(pipe);
  }
}

const Pipeline& pipe_for(const Runs& runs, int which) { return *runs.pipes[static_cast<std::size_t>(which)]; }

Outcome riesz(const Runs& runs) {
  std::size_t count = 0;
  double worst = 0;
  auto check = [&](const Pipeline& pipe, const History& h) {
    const AdaptiveSolver solver = pipe.solver();
    for (const OnlineVectorRecord& v : h.online_vectors) {
      const OnlineRegion& region =
          solver.regions()[static_cast<std::size_t>(v.group - 1)][static_cast<std::size_t>(v.region)];
      const Vector phi = pipe.space.basis * v.coefficients;
      const double e = weighted_norms(pipe.problem.fine, phi, region.fine_cells, pipe.problem.a, pipe.problem.b).energy;
      worst = std::max(worst, std::abs(e * e - v.residual2) / v.residual2);
      ++count;
    }
  };
  check(pipe_for(runs, 0), runs.online);
  check(pipe_for(runs, 1), runs.coupled[0]);
  check(pipe_for(runs, 2), runs.coupled[1]);
  return {count > 0 && worst <= kRieszTol,
          format("%zu online vectors, max | ||phi||^2 - ||R||^2 | / ||R||^2 = %.2e <= %.0e", count, worst, kRieszTol)};
}

Outcome pythagoras(const Runs& runs) {
  std::size_t pairs = 0;
  double worst = 0;
  auto check = [&](const Pipeline& pipe, const History& h) {
    const SnapshotProblem& p = pipe.snapshot;
    for (std::size_t m = 1; m < h.rows.size(); ++m) {
      const Vector d = h.rows[m].solution - h.rows[m - 1].solution;
      const double gap = h.rows[m - 1].error_energy2 - h.rows[m].error_energy2 - d.dot(p.gram * d);
      worst = std::max(worst, std::abs(gap) / p.snap_energy2);
      ++pairs;
    }
  };
  check(pipe_for(runs, 0), runs.online);
  for (int ex : {0, 1}) {
    check(pipe_for(runs, ex + 1), runs.cmp[ex].adaptive);
    check(pipe_for(runs, ex + 1), runs.cmp[ex].uniform);
    check(pipe_for(runs, ex + 1), runs.coupled[ex]);
  }
  return {pairs > 0 && worst <= kPythagorasTol,
          format("%zu consecutive pairs, max defect %.2e ||u_snap||^2 <= %.0e", pairs, worst, kPythagorasTol)};
}

Outcome adaptive_vs_uniform_check(const Runs& runs) {
  bool ok = true;
  std::string detail;
  for (int ex : {0, 1}) {
    const AdaptiveComparison& c = runs.cmp[ex];
    ok = ok && c.adaptive_e1 <= c.uniform_e1;
    detail += format("%sexample %d at DOF %d: adaptive e1 %.4e, uniform e1 %.4e", ex ? "; " : "", ex + 1, c.budget,
                     c.adaptive_e1, c.uniform_e1);
  }
  return {ok, detail};
}

Outcome switch_behaviour(const Runs& runs) {
  bool ok = true;
  std::string detail;
  for (int ex : {0, 1}) {
    const History& h = runs.coupled[ex];
    const int s = h.switch_row;
    if (s < 2) {
      ok = false;
      detail += format("%sexample %d: no switch after an offline iteration", ex ? "; " : "", ex + 1);
      continue;
    }
    const auto& rows = h.rows;
    const double offline = rows[static_cast<std::size_t>(s) - 2].e1 / rows[static_cast<std::size_t>(s) - 1].e1;
    const int k = static_cast<int>(rows.size()) - s;
    const double first = rows[static_cast<std::size_t>(s) - 1].e1 / rows[static_cast<std::size_t>(s)].e1;
    const double online = std::pow(rows[static_cast<std::size_t>(s) - 1].e1 / rows.back().e1, 1.0 / k);
    ok = ok && k > 0 && first > offline && online > offline;
    detail += format("%sexample %d: switch after iteration %d, last offline factor %.4f, first online factor %.4f, "
                     "mean online factor %.4f over %d steps",
                     ex ? "; " : "", ex + 1, rows[static_cast<std::size_t>(s) - 1].iteration, offline, first, online, k);
  }
  return {ok, detail};
}

Outcome assembly_oracles() {
  std::mt19937 gen(7);
  std::uniform_real_distribution<double> hs(1e-3, 1.0), as(1.0, 1e8), bs(1e-2, 1e2);
  double quad = 0;
  for (int t = 0; t < 100; ++t) {
    const double h = hs(gen), a = as(gen), b = bs(gen);
    const ElementMatrices e = element_matrices(h, a, b);
    const ElementMatrices q = test::quadrature_element(h, a, b);
    quad = std::max(quad, (e.curl - q.curl).cwiseAbs().maxCoeff() / q.curl.cwiseAbs().maxCoeff());
    quad = std::max(quad, (e.mass - q.mass).cwiseAbs().maxCoeff() / q.mass.cwiseAbs().maxCoeff());
  }

  double orth = 0;
  for (int n : {64, 200}) {
    const FineGrid g(n);
    const SparseMatrix G = discrete_gradient(g);
    for (int id : {1, 2}) {
      const Vector F = assemble_load(g, example_source(id, g));
      orth = std::max(orth, (G.transpose() * F).norm() / F.norm());
    }
  }

  const FineGrid g(64);
  ContrastOptions opt;
  const CellField a = contrast_power(generate_contrast_field(g, opt), 6);
  const SparseMatrix K = assemble_global(g, a, CellField(64, 1.0)).curl;
  const SparseMatrix KG = K * discrete_gradient(g);
  double kmax = 0, kgmax = 0;
  for (int k = 0; k < K.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(K, k); it; ++it) kmax = std::max(kmax, std::abs(it.value()));
  for (int k = 0; k < KG.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(KG, k); it; ++it) kgmax = std::max(kgmax, std::abs(it.value()));
  const double cg = kgmax / kmax;

  return {quad <= kQuadratureTol && orth <= kLoadOrthTol && cg <= kCurlGradTol,
          format("quadrature %.1e <= %.0e, load orthogonality %.1e <= %.0e, curl grad %.1e <= %.0e", quad,
                 kQuadratureTol, orth, kLoadOrthTol, cg, kCurlGradTol)};
}

Outcome eigen_structure(const Runs& runs) {
  double off = 0, resid = 0, min_lambda = INFINITY;
  bool ascending = true;
  int entries = 0;
  for (std::size_t k = 1; k < runs.pipes.size(); ++k) {
    for (const SpectralEntry& e : *runs.pipes[k]->spectral) {
      ++entries;
      const double dmax = e.a.diagonal().cwiseAbs().maxCoeff();
      Matrix od = e.a;
      od.diagonal().setZero();
      off = std::max(off, od.cwiseAbs().maxCoeff() / dmax);
      const double an = e.a.norm(), sn = e.s.norm();
      for (int j = 1; j <= e.size(); ++j) {
        const double l = e.lambda(j);
        min_lambda = std::min(min_lambda, l);
        if (j > 1 && l < e.lambda(j - 1)) ascending = false;
        const Vector v = e.pairs.vectors.col(j - 1);
        resid = std::max(resid, (e.a * v - l * (e.s * v)).norm() / ((an + l * sn) * v.norm()));
      }
    }
  }
  return {off <= kOffDiagTol && ascending && min_lambda >= 0 && resid <= kEigenResidualTol,
          format("%d neighbourhoods, off-diagonal %.1e <= %.0e, ascending %s, min lambda %.3e, residual %.1e <= %.0e",
                 entries, off, kOffDiagTol, ascending ? "yes" : "no", min_lambda, resid, kEigenResidualTol)};
}

struct Criterion {
  int id;
  const char* name;
  double limit_s;  // 0: no runtime limit
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  Runs runs;
  const std::vector<Criterion> criteria{
      {1, "snapshot O(H) rate", 60, snapshot_rate},
      {2, "contrast robustness", 60, contrast_robustness},
      {3, "full-space recovery", 10, full_space},
      {4, "online decay", 120, [&] { return online_decay(runs); }},
      {5, "Riesz identity", 0,
       [&] {
         run_experiments(runs);
         return riesz(runs);
       }},
      {6, "Pythagoras at enrichment", 0, [&] { return pythagoras(runs); }},
      {7, "adaptive beats uniform", 0, [&] { return adaptive_vs_uniform_check(runs); }},
      {8, "offline-online switch", 0, [&] { return switch_behaviour(runs); }},
      {9, "assembly oracles", 5, assembly_oracles},
      {10, "eigen structure", 0, [&] { return eigen_structure(runs); }},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = c.limit_s <= 0 || s <= c.limit_s;
    const bool pass = out.pass && in_time;
    failures += !pass;
    std::string time = format("%.2f s", s);
    if (c.limit_s > 0) time += format(" (limit %.0f s)", c.limit_s);
    std::printf("%s %2d %s: %s [%s]\n", pass ? "PASS" : "FAIL", c.id, c.name, out.detail.c_str(), time.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
