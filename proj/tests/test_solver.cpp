#include <cmath>

#include "attopt/cone_program.hpp"
#include "attopt/socp_solver.hpp"
#include "doctest.h"

using namespace attopt;

TEST_SUITE_BEGIN("solver");

TEST_CASE("orthant lower bound") {
  // min x s.t. x >= 3
  ConeProgramBuilder bld(1);
  bld.set_objective(0, 1.0);
  bld.mark_zero_rows_end();
  bld.add_row({{0, -1.0}}, -3.0);
  const auto sol = solve_cone_program(bld.build());
  REQUIRE(sol.status == SolveStatus::optimal);
  CHECK(sol.x(0) == doctest::Approx(3.0).epsilon(1e-7));
  CHECK(sol.gap <= 1e-8);
}

TEST_CASE("norm minimization over a line") {
  // min ||(x,y)|| s.t. x + y = 2 -> (1,1), objective sqrt(2)
  ConeProgramBuilder bld(3);  // x, y, t
  bld.set_objective(2, 1.0);
  bld.add_row({{0, 1.0}, {1, 1.0}}, 2.0);
  bld.mark_zero_rows_end();
  bld.mark_nonneg_rows_end();
  bld.begin_soc();
  bld.add_row({{2, -1.0}}, 0.0);
  bld.add_row({{0, -1.0}}, 0.0);
  bld.add_row({{1, -1.0}}, 0.0);
  bld.end_soc();
  const auto sol = solve_cone_program(bld.build());
  REQUIRE(sol.status == SolveStatus::optimal);
  CHECK(sol.x(0) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(sol.x(1) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(sol.objective == doctest::Approx(std::sqrt(2.0)).epsilon(1e-7));
}

TEST_CASE("distance to a point") {
  // min t, t >= ||(x - 3, y - 4)||, x = 0, y = 0 -> t = 5
  ConeProgramBuilder bld(3);
  bld.set_objective(2, 1.0);
  bld.add_row({{0, 1.0}}, 0.0);
  bld.add_row({{1, 1.0}}, 0.0);
  bld.mark_zero_rows_end();
  bld.mark_nonneg_rows_end();
  bld.begin_soc();
  bld.add_row({{2, -1.0}}, 0.0);
  bld.add_row({{0, -1.0}}, -3.0);
  bld.add_row({{1, -1.0}}, -4.0);
  bld.end_soc();
  const auto sol = solve_cone_program(bld.build());
  REQUIRE(sol.status == SolveStatus::optimal);
  CHECK(sol.x(2) == doctest::Approx(5.0).epsilon(1e-7));
}

TEST_CASE("primal infeasible program is detected") {
  // x >= 1 and x <= 0
  ConeProgramBuilder bld(1);
  bld.set_objective(0, 1.0);
  bld.mark_zero_rows_end();
  bld.add_row({{0, -1.0}}, -1.0);  // x >= 1
  bld.add_row({{0, 1.0}}, 0.0);    // x <= 0
  const auto sol = solve_cone_program(bld.build());
  CHECK(sol.status == SolveStatus::infeasible);
}

TEST_CASE("unbounded program is detected") {
  // min -x s.t. x >= 0
  ConeProgramBuilder bld(1);
  bld.set_objective(0, -1.0);
  bld.mark_zero_rows_end();
  bld.add_row({{0, -1.0}}, 0.0);
  const auto sol = solve_cone_program(bld.build());
  CHECK(sol.status == SolveStatus::unbounded);
}

TEST_CASE("complementary slackness at optimality") {
  // box LP: min -x - y, 0 <= x <= 1, 0 <= y <= 2
  ConeProgramBuilder bld(2);
  bld.set_objective(0, -1.0);
  bld.set_objective(1, -1.0);
  bld.mark_zero_rows_end();
  bld.add_row({{0, -1.0}}, 0.0);
  bld.add_row({{0, 1.0}}, 1.0);
  bld.add_row({{1, -1.0}}, 0.0);
  bld.add_row({{1, 1.0}}, 2.0);
  const auto sol = solve_cone_program(bld.build());
  REQUIRE(sol.status == SolveStatus::optimal);
  CHECK(sol.x(0) == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(sol.x(1) == doctest::Approx(2.0).epsilon(1e-7));
  CHECK(sol.s.dot(sol.y) <= 10.0 * 1e-8);
}

TEST_CASE("deterministic solves and scale invariance of the argmin") {
  auto build = [](double cscale) {
    ConeProgramBuilder bld(3);
    bld.set_objective(2, cscale);
    bld.add_row({{0, 2.0}, {1, -1.0}}, 1.0);
    bld.mark_zero_rows_end();
    bld.add_row({{0, -1.0}}, 0.5);
    bld.mark_nonneg_rows_end();
    bld.begin_soc();
    bld.add_row({{2, -1.0}}, 0.0);
    bld.add_row({{0, -1.0}, {1, 0.3}}, 0.2);
    bld.add_row({{1, -1.0}}, 1.0);
    bld.end_soc();
    return bld.build();
  };
  const auto s1 = solve_cone_program(build(1.0));
  const auto s2 = solve_cone_program(build(1.0));
  REQUIRE(s1.status == SolveStatus::optimal);
  CHECK((s1.x - s2.x).norm() == 0.0);  // bit-identical iterates

  const auto s10 = solve_cone_program(build(10.0));
  REQUIRE(s10.status == SolveStatus::optimal);
  CHECK((s1.x - s10.x).lpNorm<Eigen::Infinity>() < 1e-7);
}

TEST_CASE("rest-to-rest double integrator hits the analytic minimum time") {
  // theta'' = u, |u| <= 1, slew of 1 rad: T* = 2 sqrt(theta) = 2.
  // Feasibility of a candidate T is checked by minimizing the peak
  // torque with exact first-order-hold discretization; bisection on T.
  const int K = 50;
  const double theta_goal = 1.0;

  auto min_peak_torque = [&](double T) {
    const double dt = T / (K - 1);
    // vars: theta_k (K), omega_k (K), u_k (K), s
    const int vtheta = 0, vomega = K, vu = 2 * K, vs = 3 * K;
    ConeProgramBuilder bld(3 * K + 1);
    bld.set_objective(vs, 1.0);
    for (int k = 0; k + 1 < K; ++k) {
      // exact FOH update of the double integrator
      bld.add_row({{vtheta + k + 1, -1.0},
                   {vtheta + k, 1.0},
                   {vomega + k, dt},
                   {vu + k, dt * dt / 3.0},
                   {vu + k + 1, dt * dt / 6.0}},
                  0.0);
      bld.add_row({{vomega + k + 1, -1.0},
                   {vomega + k, 1.0},
                   {vu + k, dt / 2.0},
                   {vu + k + 1, dt / 2.0}},
                  0.0);
    }
    bld.add_row({{vtheta, 1.0}}, 0.0);
    bld.add_row({{vomega, 1.0}}, 0.0);
    bld.add_row({{vtheta + K - 1, 1.0}}, theta_goal);
    bld.add_row({{vomega + K - 1, 1.0}}, 0.0);
    bld.mark_zero_rows_end();
    for (int k = 0; k < K; ++k) {
      bld.add_row({{vu + k, 1.0}, {vs, -1.0}}, 0.0);   // u <= s
      bld.add_row({{vu + k, -1.0}, {vs, -1.0}}, 0.0);  // -u <= s
    }
    const auto sol = solve_cone_program(bld.build());
    REQUIRE(sol.status == SolveStatus::optimal);
    return sol;
  };

  double lo = 0.5, hi = 4.0;
  for (int it = 0; it < 14; ++it) {
    const double mid = 0.5 * (lo + hi);
    const auto sol = min_peak_torque(mid);
    if (sol.x(3 * K) <= 1.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  const double T_star = 0.5 * (lo + hi);
  CHECK(T_star == doctest::Approx(2.0).epsilon(0.01));

  // at the critical time the minimizing torque is bang-bang
  const auto sol = min_peak_torque(hi);
  int saturated = 0;
  for (int k = 0; k < K; ++k) {
    if (std::abs(std::abs(sol.x(2 * K + k)) - sol.x(3 * K)) < 1e-3) {
      ++saturated;
    }
  }
  CHECK(saturated > K * 8 / 10);
}

TEST_SUITE_END();
