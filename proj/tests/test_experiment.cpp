#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include "hcms/error.hpp"
#include "support.hpp"

using namespace hcms;

TEST_CASE("error metrics") {
  const Pipeline pipe(test::small_config(16, 4));
  const Problem& pr = pipe.problem;
  const Vector u_h = solve_fine(pr);
  const Vector u_snap = pipe.snapshot_solution();

  const ErrorMetrics same = compute_metrics(pr.fine, u_h, u_snap, u_snap, pr.a, pr.b);
  CHECK(same.e1 == 0.0);
  CHECK(same.e2 == 0.0);
  CHECK(same.e1_tilde > 0.0);
  CHECK(same.e1_tilde < 1.0);

  CHECK(compute_metrics(pr.fine, u_h, u_h, u_h, pr.a, pr.b).e1_tilde == 0.0);

  const Vector zero = Vector::Zero(u_h.size());
  const ErrorMetrics none = compute_metrics(pr.fine, u_h, u_snap, zero, pr.a, pr.b);
  CHECK(none.e1 == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(none.e2 == doctest::Approx(1.0).epsilon(1e-14));

  // Energy ratio agrees with the snapshot-coordinate Gram form.
  const Vector d = u_h - u_snap;
  CHECK(same.e1_tilde == doctest::Approx(std::sqrt(d.dot(pr.A * d) / u_h.dot(pr.A * u_h))).epsilon(1e-10));

  CHECK_THROWS_AS(compute_metrics(pr.fine, zero, u_snap, u_snap, pr.a, pr.b), Error);
  CHECK_THROWS_AS(compute_metrics(pr.fine, u_h, zero, u_snap, pr.a, pr.b), Error);
  CHECK_THROWS_AS(compute_metrics(pr.fine, u_h, u_snap, Vector::Zero(3), pr.a, pr.b), Error);
}

TEST_CASE("fine solve satisfies the boundary condition and the system") {
  const Problem pr = setup_problem(test::small_config(16, 4));
  const Vector u = solve_fine(pr);
  for (int e = 0; e < pr.fine.num_edges(); ++e)
    if (pr.fine.is_boundary(e)) CHECK(u[e] == 0.0);
  const Vector r = pr.A * u - pr.F;
  for (int e = 0; e < pr.fine.num_edges(); ++e)
    if (!pr.fine.is_boundary(e)) CHECK(std::abs(r[e]) <= 1e-9 * pr.F.norm());
}

TEST_CASE("convergence study table and csv") {
  RunConfig cfg = test::small_config(16, 4);
  cfg.coarse_list = {2, 4};
  cfg.p_list = {1, 2};
  const ConvergenceTable t = convergence_study(cfg);
  REQUIRE(t.e1_tilde.size() == 2);
  for (const auto& row : t.e1_tilde) {
    REQUIRE(row.size() == 2);
    for (double e : row) {
      CHECK(e > 0.0);
      CHECK(e < 1.0);
    }
  }
  const auto path = std::filesystem::temp_directory_path() / "hcms_test_convergence.csv";
  write_convergence_csv(t, path);
  std::ifstream in(path);
  std::string header, line;
  std::getline(in, header);
  CHECK(header == "H,contrast_1e+01,contrast_1e+02");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 2);
  std::filesystem::remove(path);

  cfg.coarse_list = {4, 3};
  CHECK_THROWS_AS(convergence_study(cfg), Error);
}

TEST_CASE("adaptive versus uniform") {
  const Pipeline pipe(test::small_config(32, 4));
  const AdaptiveComparison cmp = adaptive_vs_uniform(pipe);
  CHECK(cmp.budget == cmp.uniform.rows.back().dof);
  for (std::size_t m = 1; m < cmp.uniform.rows.size(); ++m) {
    CHECK(cmp.uniform.rows[m].dof > cmp.uniform.rows[m - 1].dof);
    CHECK(cmp.uniform.rows[m].e1 <= cmp.uniform.rows[m - 1].e1 + 1e-12);
  }
  for (std::size_t m = 1; m < cmp.adaptive.rows.size(); ++m)
    CHECK(cmp.adaptive.rows[m].e1 <= cmp.adaptive.rows[m - 1].e1 + 1e-12);
  CHECK(cmp.adaptive.rows.front().dof <= cmp.budget);
  CHECK(cmp.uniform_e1 == cmp.uniform.rows.back().e1);
}

TEST_CASE("offline-online experiment on a small grid") {
  const Pipeline pipe(test::small_config(16, 4));
  const History h = offline_online_experiment(pipe);
  REQUIRE(h.switch_row > 0);
  CHECK(h.rows.back().phase == Phase::Online);
  CHECK(h.rows.back().e1 < h.rows[static_cast<std::size_t>(h.switch_row) - 1].e1);
}
