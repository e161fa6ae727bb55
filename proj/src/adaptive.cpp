#include "hcms/adaptive.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <ostream>

#include "hcms/error.hpp"

namespace hcms {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

}  // namespace

LocalDualNorm::LocalDualNorm(const SnapshotProblem& problem, std::vector<int> columns)
    : columns_(std::move(columns)), gram_(gram_block(problem.gram, columns_)), factor_(gram_) {}

Vector LocalDualNorm::functional(const Vector& residual) const {
  Vector g(static_cast<Eigen::Index>(columns_.size()));
  for (std::size_t k = 0; k < columns_.size(); ++k) g[static_cast<Eigen::Index>(k)] = residual[columns_[k]];
  return g;
}

Vector snapshot_residual(const SnapshotProblem& problem, const Vector& u) {
  return problem.gram * u - problem.load;
}

double residual_norm2(const SnapshotProblem& problem, const std::vector<int>& columns, const Vector& u) {
  const LocalDualNorm dual(problem, columns);
  return dual.norm2(dual.functional(snapshot_residual(problem, u)));
}

std::vector<int> offline_mark(std::span<const double> eta2, double theta) {
  if (theta < 0.0 || theta >= 1.0) throw Error(ErrorKind::InvalidArgument, "theta must lie in [0, 1)");
  std::vector<int> order(eta2.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
    return eta2[static_cast<std::size_t>(x)] > eta2[static_cast<std::size_t>(y)];
  });
  const double total = std::accumulate(eta2.begin(), eta2.end(), 0.0);
  std::size_t k = 0;
  double partial = 0.0;
  while (k < order.size() && partial < theta * total) partial += eta2[static_cast<std::size_t>(order[k++])];
  if (k == 0 && total > 0.0) k = 1;
  order.resize(k);
  return order;
}

int offline_enrich_count(std::span<const double> lambdas, int l, double delta0) {
  const int J = static_cast<int>(lambdas.size());
  if (l < 0 || l >= J) {
    throw Error(ErrorKind::InvalidArgument, "cannot enrich: " + std::to_string(l) + " of " +
                                                std::to_string(J) + " eigenvectors already in use");
  }
  const double first = lambdas[static_cast<std::size_t>(l)];
  for (int s = 1; s < J - l; ++s) {
    const double next = lambdas[static_cast<std::size_t>(l + s)];
    if (next > 0.0 && first / next <= delta0) return s;
  }
  return J - l;
}

std::array<std::vector<OnlineRegion>, 4> build_online_regions(const CoarseGrid& coarse,
                                                              const SnapshotSpace* space) {
  const int N = coarse.N();
  if (N < 2) throw Error(ErrorKind::InvalidArgument, "online regions need at least 2x2 coarse cells");
  std::array<std::vector<OnlineRegion>, 4> groups;
  const int nh = N * (N + 1);
  for (int j = 1; j < N; ++j) {
    for (int i = 1; i < N; ++i) {
      OnlineRegion reg;
      reg.anchor_i = i;
      reg.anchor_j = j;
      reg.group = (i % 2 == 1 ? 1 : 3) + (j % 2 == 1 ? 0 : 1);
      reg.coarse_cells = {coarse.cell(i - 1, j - 1), coarse.cell(i, j - 1), coarse.cell(i - 1, j), coarse.cell(i, j)};
      const std::array<int, 4> edges = {j * N + (i - 1), j * N + i, nh + (j - 1) * (N + 1) + i,
                                        nh + j * (N + 1) + i};
      for (int k = 0; k < 4; ++k) reg.neighborhoods[static_cast<std::size_t>(k)] = coarse.interior_index(edges[static_cast<std::size_t>(k)]);
      for (int K : reg.coarse_cells) {
        const auto cells = coarse.fine_cells(K);
        reg.fine_cells.insert(reg.fine_cells.end(), cells.begin(), cells.end());
      }
      std::sort(reg.fine_cells.begin(), reg.fine_cells.end());
      if (space) {
        for (int nb : reg.neighborhoods) {
          const BlockRange br = space->blocks[static_cast<std::size_t>(nb)];
          for (int c = 0; c < br.count; ++c) reg.columns.push_back(br.offset + c);
        }
        std::sort(reg.columns.begin(), reg.columns.end());
      }
      groups[static_cast<std::size_t>(reg.group - 1)].push_back(std::move(reg));
    }
  }
  return groups;
}

void AdaptiveConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::Config, msg); };
  if (!(theta >= 0.0 && theta < 1.0)) fail("theta must lie in [0, 1)");
  if (!(delta0 >= 0.0 && delta0 < 1.0)) fail("delta0 must lie in [0, 1)");
  if (!(delta > 0.0 && delta < 1.0)) fail("delta must lie in (0, 1)");
  if (!(percentage > 0.0 && percentage < 1.0)) fail("percentage must lie in (0, 1)");
  if (initial_number < 0) fail("initial_number must be >= 0");
  if (online_iterations < 0) fail("online_iterations must be >= 0");
  if (!(stop_tol >= 0.0)) fail("stop_tol must be >= 0");
  if (dof_cap < 0) fail("dof_cap must be >= 0");
  if (max_iterations < 0) fail("max_iterations must be >= 0");
  if (uniform_levels < 0) fail("uniform_levels must be >= 0");
}

std::string_view to_string(Phase phase) {
  switch (phase) {
    case Phase::Offline: return "offline";
    case Phase::Online: return "online";
    case Phase::Uniform: return "uniform";
  }
  return "unknown";
}

void write_history_csv(const History& history, std::ostream& out) {
  out << "iteration,phase,DOF,e1,e2,sum_eta2,wall_ms\n";
  char buf[160];
  for (const auto& row : history.rows) {
    std::snprintf(buf, sizeof buf, "%d,%s,%d,%.17g,%.17g,%.17g,%.3f\n", row.iteration,
                  std::string(to_string(row.phase)).c_str(), row.dof, row.e1, row.e2, row.sum_eta2, row.wall_ms);
    out << buf;
  }
}

void write_history_csv(const History& history, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot open " + path.string() + " for writing");
  write_history_csv(history, out);
  if (!out) throw Error(ErrorKind::Io, "failed writing " + path.string());
}

AdaptiveSolver::AdaptiveSolver(const CoarseGrid& coarse, const SnapshotSpace& snapshots,
                               const SnapshotProblem& problem, std::shared_ptr<const SpectralData> spectral,
                               AdaptiveConfig config)
    : coarse_(&coarse), snapshots_(&snapshots), problem_(&problem), spectral_(std::move(spectral)),
      config_(config) {
  config_.validate();
  if (!spectral_ || spectral_->size() != snapshots.blocks.size()) {
    throw Error(ErrorKind::DimensionMismatch, "spectral data does not match the snapshot space");
  }
  local_norms_.reserve(snapshots.blocks.size());
  for (const BlockRange& br : snapshots.blocks) {
    std::vector<int> cols(static_cast<std::size_t>(br.count));
    std::iota(cols.begin(), cols.end(), br.offset);
    local_norms_.emplace_back(problem, std::move(cols));
  }
  regions_ = build_online_regions(coarse, &snapshots);
  for (std::size_t g = 0; g < 4; ++g)
    for (const auto& reg : regions_[g]) region_norms_[g].emplace_back(problem, reg.columns);
}

int AdaptiveSolver::dof_cap() const {
  return config_.dof_cap > 0 ? config_.dof_cap : snapshots_->dim();
}

double AdaptiveSolver::energy_error2(const Vector& u) const {
  const Vector d = problem_->snap_coeffs - u;
  return std::max(d.dot(problem_->gram * d), 0.0);
}

ResidualReport AdaptiveSolver::indicators(const MultiscaleSpace& space, const Vector& u) const {
  const Vector residual = snapshot_residual(*problem_, u);
  ResidualReport rep;
  const auto n = local_norms_.size();
  rep.residual2.resize(n);
  rep.next_lambda.resize(n);
  rep.eta2.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& dual = local_norms_[i];
    const double r2 = dual.norm2(dual.functional(residual));
    const double lam = space.next_lambda(static_cast<int>(i));
    rep.residual2[i] = r2;
    rep.next_lambda[i] = lam;
    rep.eta2[i] = std::isinf(lam) ? 0.0 : r2 / lam;
    rep.sum_eta2 += rep.eta2[i];
  }
  return rep;
}

void AdaptiveSolver::resolve(AdaptState& state) const {
  state.solution = solve_gmsfem(state.space, *problem_);
  state.report = indicators(state.space, state.solution.snap);
}

AdaptState AdaptiveSolver::initial_state() const {
  AdaptState state{0, Phase::Offline,
                   MultiscaleSpace(spectral_, snapshots_->blocks, config_.initial_number),
                   {}, {}, std::vector<bool>(snapshots_->blocks.size(), false), 0.0};
  resolve(state);
  state.initial_sum_eta2 = state.report.sum_eta2;
  return state;
}

OfflineStep AdaptiveSolver::offline_iterate(AdaptState& state) const {
  OfflineStep step;
  step.marked = offline_mark(state.report.eta2, config_.theta);
  for (int i : step.marked) {
    if (state.space.exhausted(i)) {
      step.added.push_back(0);
      continue;
    }
    const SpectralEntry& entry = (*spectral_)[static_cast<std::size_t>(i)];
    const int l = state.space.count(i);
    const std::span<const double> lambdas(entry.pairs.values.data(), static_cast<std::size_t>(entry.size()));
    const int s = offline_enrich_count(lambdas, l, config_.delta0);
    if (entry.lambda(l + s) / entry.lambda(l + s + 1) >= config_.delta) state.saturated[static_cast<std::size_t>(i)] = true;
    state.space.set_count(i, l + s);
    step.added.push_back(s);
    step.enriched = true;
  }
  if (step.enriched) {
    resolve(state);
    ++state.iteration;
  }
  return step;
}

bool AdaptiveSolver::uniform_iterate(AdaptState& state) const {
  bool any = false;
  for (int i = 0; i < state.space.num_neighborhoods(); ++i) {
    if (state.space.exhausted(i)) continue;
    state.space.set_count(i, state.space.count(i) + 1);
    any = true;
  }
  if (any) {
    resolve(state);
    ++state.iteration;
  }
  return any;
}

OnlineStep AdaptiveSolver::online_iterate(AdaptState& state, History* history) const {
  OnlineStep step;
  const Vector residual = snapshot_residual(*problem_, state.solution.snap);
  std::array<std::vector<double>, 4> norms;
  std::array<std::vector<Vector>, 4> functionals;
  for (std::size_t g = 0; g < 4; ++g) {
    for (const auto& dual : region_norms_[g]) {
      Vector fn = dual.functional(residual);
      const double r2 = dual.norm2(fn);
      norms[g].push_back(r2);
      functionals[g].push_back(std::move(fn));
      step.group_residual2[g] += r2;
    }
  }
  std::size_t best = 0;
  for (std::size_t g = 1; g < 4; ++g)
    if (step.group_residual2[g] > step.group_residual2[best]) best = g;
  step.group = static_cast<int>(best) + 1;

  const double floor = 1e-24 * std::max(problem_->snap_energy2, 1e-300);
  const int dim_snap = snapshots_->dim();
  for (std::size_t k = 0; k < region_norms_[best].size(); ++k) {
    const double r2 = norms[best][k];
    if (!(r2 > floor)) continue;
    const auto& dual = region_norms_[best][k];
    const Vector local = dual.representer(functionals[best][k]);
    Vector full = Vector::Zero(dim_snap);
    for (std::size_t c = 0; c < dual.columns().size(); ++c) full[dual.columns()[c]] = local[static_cast<Eigen::Index>(c)];
    if (history) {
      history->online_vectors.push_back({state.iteration + 1, step.group, static_cast<int>(k), r2, full});
    }
    state.space.add_online(std::move(full));
    step.used_residual2 += r2;
    ++step.added;
  }
  if (step.added > 0) {
    resolve(state);
    ++state.iteration;
    state.phase = Phase::Online;
  }
  return step;
}

IterationRecord AdaptiveSolver::record(const AdaptState& state, double wall_ms) const {
  IterationRecord row;
  row.iteration = state.iteration;
  row.phase = state.phase;
  row.dof = state.space.dim();
  row.error_energy2 = energy_error2(state.solution.snap);
  row.e1 = problem_->snap_energy2 > 0 ? std::sqrt(row.error_energy2 / problem_->snap_energy2) : 0.0;
  const Vector d = problem_->snap_coeffs - state.solution.snap;
  const double l2 = std::max(d.dot(problem_->l2_gram * d), 0.0);
  row.e2 = problem_->snap_l2_2 > 0 ? std::sqrt(l2 / problem_->snap_l2_2) : 0.0;
  row.sum_eta2 = state.report.sum_eta2;
  row.wall_ms = config_.record_timing ? wall_ms : 0.0;
  row.saturated = static_cast<int>(std::count(state.saturated.begin(), state.saturated.end(), true));
  if (config_.keep_solutions) row.solution = state.solution.snap;
  return row;
}

std::string AdaptiveSolver::offline_stop(const AdaptState& state) const {
  if (state.iteration >= config_.max_iterations) return "max-iterations";
  if (state.report.sum_eta2 <= config_.stop_tol * state.initial_sum_eta2) return "converged";
  if (state.space.dim() >= dof_cap()) return "dof-cap";
  return {};
}

History AdaptiveSolver::run_offline() const {
  History h;
  auto t = Clock::now();
  AdaptState state = initial_state();
  h.rows.push_back(record(state, elapsed_ms(t)));
  while (true) {
    if (auto reason = offline_stop(state); !reason.empty()) {
      h.stop_reason = reason;
      break;
    }
    t = Clock::now();
    const OfflineStep step = offline_iterate(state);
    if (!step.enriched) {
      h.stop_reason = "exhausted";
      break;
    }
    IterationRecord row = record(state, elapsed_ms(t));
    row.enriched = static_cast<int>(step.marked.size());
    h.rows.push_back(std::move(row));
  }
  return h;
}

History AdaptiveSolver::run_uniform() const {
  History h;
  auto t = Clock::now();
  AdaptState state = initial_state();
  state.phase = Phase::Uniform;
  h.rows.push_back(record(state, elapsed_ms(t)));
  h.stop_reason = "levels";
  for (int level = 0; level < config_.uniform_levels; ++level) {
    t = Clock::now();
    if (!uniform_iterate(state)) {
      h.stop_reason = "exhausted";
      break;
    }
    IterationRecord row = record(state, elapsed_ms(t));
    row.enriched = state.space.num_neighborhoods();
    h.rows.push_back(std::move(row));
  }
  return h;
}

History AdaptiveSolver::run_online() const {
  History h;
  auto t = Clock::now();
  AdaptState state = initial_state();
  h.rows.push_back(record(state, elapsed_ms(t)));
  h.stop_reason = "iterations";
  for (int k = 0; k < config_.online_iterations; ++k) {
    t = Clock::now();
    const OnlineStep step = online_iterate(state, &h);
    if (step.added == 0) {
      h.stop_reason = "converged";
      break;
    }
    IterationRecord row = record(state, elapsed_ms(t));
    row.online_residual2 = step.used_residual2;
    row.enriched = step.added;
    if (h.switch_row < 0) h.switch_row = static_cast<int>(h.rows.size());
    h.rows.push_back(std::move(row));
  }
  return h;
}

History AdaptiveSolver::run_offline_online() const {
  History h;
  auto t = Clock::now();
  AdaptState state = initial_state();
  h.rows.push_back(record(state, elapsed_ms(t)));
  const auto total = static_cast<double>(state.space.num_neighborhoods());

  bool flag = false;
  while (!flag) {
    if (auto reason = offline_stop(state); !reason.empty()) {
      h.stop_reason = "offline " + reason;
      break;
    }
    t = Clock::now();
    const OfflineStep step = offline_iterate(state);
    if (!step.enriched) {
      h.stop_reason = "offline exhausted";
      break;
    }
    IterationRecord row = record(state, elapsed_ms(t));
    row.enriched = static_cast<int>(step.marked.size());
    h.rows.push_back(std::move(row));
    flag = h.rows.back().saturated / total >= config_.percentage;
  }
  if (flag) h.stop_reason = "switched";

  for (int k = 0; k < config_.online_iterations; ++k) {
    t = Clock::now();
    const OnlineStep step = online_iterate(state, &h);
    if (step.added == 0) {
      h.stop_reason += ", online converged";
      break;
    }
    IterationRecord row = record(state, elapsed_ms(t));
    row.online_residual2 = step.used_residual2;
    row.enriched = step.added;
    if (h.switch_row < 0) h.switch_row = static_cast<int>(h.rows.size());
    h.rows.push_back(std::move(row));
  }
  return h;
}

}  // namespace hcms
