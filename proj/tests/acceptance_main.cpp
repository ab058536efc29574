// Acceptance suite: one pass/fail line per criterion.
//
// Usage: acceptance [A1 A2 ...]   (no arguments runs everything)
// Exit code: number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "attopt/mission.hpp"
#include "attopt/socp_solver.hpp"
#include "attopt/tracking.hpp"

using namespace attopt;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double wall_since(const std::chrono::steady_clock::time_point &t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

struct LinFit {
  double slope = 0, intercept = 0, r2 = 0;
};

LinFit least_squares(const std::vector<double> &x,
                     const std::vector<double> &y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  LinFit f;
  f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  f.intercept = (sy - f.slope * sx) / n;
  double ss_res = 0, ss_tot = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double fit = f.slope * x[i] + f.intercept;
    ss_res += (y[i] - fit) * (y[i] - fit);
    ss_tot += (y[i] - sy / n) * (y[i] - sy / n);
  }
  f.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return f;
}

// ---------------------------------------------------------------------
// shared campaign state

struct SlewCase {
  double angle_deg = 0;
  ScpResult result;
  double energy_j = 0;
  double wall_s = 0;
};

struct Campaign {
  SatelliteParams p = SatelliteParams::reference();
  std::vector<double> angles_deg{10, 30, 60, 90, 120};
  std::map<int, std::vector<SlewCase>> by_axis;  // 0 = x, 2 = z

  const std::vector<SlewCase> &axis_cases(int axis) {
    auto it = by_axis.find(axis);
    if (it != by_axis.end()) return it->second;
    std::vector<SlewCase> cases;
    const Vec3 ax = axis == 0 ? Vec3(1, 0, 0) : Vec3(0, 0, 1);
    for (double deg : angles_deg) {
      SlewCase c;
      c.angle_deg = deg;
      const auto t0 = std::chrono::steady_clock::now();
      c.result = solve_min_time(
          UnitQuaternion::identity(),
          axis_angle_to_quaternion({ax, deg * kPi / 180.0}),
          p, ScpConfig{});
      c.wall_s = wall_since(t0);
      if (c.result.converged) {
        c.energy_j = cumulative_energy(replay_nonlinear(c.result.solution, p), p);
      }
      cases.push_back(std::move(c));
    }
    return by_axis.emplace(axis, std::move(cases)).first->second;
  }
};

// desk-scale scenario shared by A7 and A9
struct DeskScenario {
  bool built = false;
  bool schedule_ok = false;
  int observations = 0;
  ScpResult plan;
  PointingScheduleSpec spec;
  SatelliteParams p = SatelliteParams::reference();
  std::vector<int> obs_nodes;
  std::string note;
};

DeskScenario build_desk_scenario() {
  DeskScenario d;
  d.built = true;

  // small real campaign for the scheduler's slew estimates
  ScpConfig atlas_cfg;
  RotationGrid grid;
  grid.axes = equidistributed_axes(6);
  grid.angles_deg = {-150, -90, -45, -10, 10, 45, 90, 150};
  SlewAtlas atlas = build_atlas(grid, d.p, atlas_cfg, 4);
  for (const auto &e : atlas.entries) {
    if (!e.converged) {
      d.note = "atlas instance failed to converge";
      return d;
    }
  }
  atlas.fits = fit_models(atlas);

  // 4 x 3 lattice of targets, 8 km spacing, under the ascending track
  CircularOrbit orbit;
  std::vector<GroundTarget> targets;
  int id = 0;
  for (double lat : {8.85, 8.922, 8.994, 9.066}) {
    for (double lon : {-2.05, -1.978, -1.906}) {
      targets.push_back(
          {"gp" + std::to_string(id++), lat, lon, "basin_a"});
    }
  }
  const auto sweep =
      build_sweep_schedule(orbit, targets, atlas, 1.0, 400.0, 45.0);
  d.observations = static_cast<int>(sweep.schedule.entries.size());
  if (d.observations != 12 || !sweep.skipped.empty()) {
    d.note = "scheduler placed " + std::to_string(d.observations) +
             " of 12 targets";
    return d;
  }

  PointingSchedule schedule = sweep.schedule;
  const double t0 = schedule.entries.front().t_s - 10.0;
  for (auto &e : schedule.entries) e.t_s -= t0;
  if (schedule.entries.back().t_s > 110.0) {
    d.note = "schedule span exceeds the 120 s horizon";
    return d;
  }
  d.schedule_ok = true;

  const double t_f = 120.0;
  const int K = 121;
  d.spec = schedule_to_spec(schedule, t_f, K);
  for (const auto &t : d.spec.targets) {
    if (t.attitude.has_value()) d.obs_nodes.push_back(t.node);
  }

  ScpConfig cfg;
  cfg.K = K;
  cfg.t_f = t_f;
  cfg.eps_vc = 1e-3;
  cfg.eps_tr = 1e-4;
  const GyrostatState x0 =
      GyrostatState::rest(schedule.entries.front().attitude);
  d.plan = solve_multi_target(d.spec, x0, d.p, cfg);
  return d;
}

// ---------------------------------------------------------------------
// criteria

Outcome a1_principal_axis_times(Campaign &camp) {
  Outcome out;
  out.pass = true;
  std::ostringstream ss;
  for (const SlewCase &c : camp.axis_cases(0)) {
    const double theta = c.angle_deg * kPi / 180.0;
    const double analytic = 2.0 * std::sqrt(theta * 8.5 / 0.1632);
    const double ratio = c.result.t_f / analytic;
    const bool ok = c.result.converged && std::abs(ratio - 1.0) <= 0.02 &&
                    c.wall_s <= 60.0;
    out.pass = out.pass && ok;
    ss << " " << c.angle_deg << "deg:" << (ok ? "" : "!") << c.result.t_f
       << "s/" << analytic << "s";
  }
  out.detail = "x-axis t_f vs double-integrator oracle within 2%:" + ss.str();
  return out;
}

Outcome a2_x_axis_power_fit(Campaign &camp) {
  std::vector<double> lt, lT;
  for (const SlewCase &c : camp.axis_cases(0)) {
    if (!c.result.converged) continue;
    lt.push_back(std::log(c.angle_deg * kPi / 180.0));
    lT.push_back(std::log(c.result.t_f));
  }
  Outcome out;
  if (lt.size() < 4) {
    out.detail = "not enough converged x-axis instances";
    return out;
  }
  const LinFit f = least_squares(lt, lT);
  const double a = std::exp(f.intercept);
  out.pass = a >= 14.15 && a <= 14.73 && f.slope >= 0.49 && f.slope <= 0.51;
  std::ostringstream ss;
  ss << "x-axis fit a = " << a << " (want 14.15..14.73), b = " << f.slope
     << " (want 0.49..0.51)";
  out.detail = ss.str();
  return out;
}

Outcome a3_z_axis_coefficient(Campaign &camp) {
  std::vector<double> lt, lT;
  for (const SlewCase &c : camp.axis_cases(2)) {
    if (!c.result.converged) continue;
    lt.push_back(std::log(c.angle_deg * kPi / 180.0));
    lT.push_back(std::log(c.result.t_f));
  }
  Outcome out;
  if (lt.size() < 4) {
    out.detail = "not enough converged z-axis instances";
    return out;
  }
  const LinFit f = least_squares(lt, lT);
  const double a = std::exp(f.intercept);
  out.pass = a >= 19.1 && a <= 20.3;
  std::ostringstream ss;
  ss << "z-axis fit a = " << a
     << " (want 19.1..20.3; rotor-momentum saturation lengthens slews "
        "beyond ~140 deg)";
  out.detail = ss.str();
  return out;
}

Outcome a4_energy_linearity(Campaign &camp) {
  std::vector<double> theta, energy;
  for (const SlewCase &c : camp.axis_cases(0)) {
    if (!c.result.converged) continue;
    theta.push_back(c.angle_deg * kPi / 180.0);
    energy.push_back(c.energy_j);
  }
  Outcome out;
  if (theta.size() < 4) {
    out.detail = "not enough converged x-axis instances";
    return out;
  }
  const LinFit f = least_squares(theta, energy);
  const double slope_err = std::abs(f.slope - 78.0329) / 78.0329;
  out.pass = f.r2 >= 0.99 && slope_err <= 0.10;
  std::ostringstream ss;
  ss << "x-axis energy fit R2 = " << f.r2 << " (want >= 0.99), slope = "
     << f.slope << " J/rad vs 78.0329 published (err " << slope_err * 100.0
     << "%, want <= 10%)";
  out.detail = ss.str();
  return out;
}

Outcome a5_bang_bang(Campaign &camp) {
  Outcome out;
  out.pass = true;
  double worst = 1.0;
  const double u_max = camp.p.u_max;
  for (int axis : {0, 2}) {
    for (const SlewCase &c : camp.axis_cases(axis)) {
      if (!c.result.converged) continue;
      const int K = c.result.solution.num_nodes();
      int saturated = 0;
      for (int k = 1; k + 1 < K; ++k) {
        bool all = true;
        for (int i = 0; i < 4; ++i) {
          all = all &&
                std::abs(c.result.solution.inputs[k](i)) >= 0.99 * u_max;
        }
        if (all) ++saturated;
      }
      const double frac = static_cast<double>(saturated) / (K - 2);
      worst = std::min(worst, frac);
      out.pass = out.pass && frac >= 0.90;
    }
  }
  std::ostringstream ss;
  ss << "interior nodes with all four rotors at >= 0.99 u_max: worst "
        "fraction "
     << worst << " (want >= 0.90)";
  out.detail = ss.str();
  return out;
}

Outcome a6_scp_bookkeeping(const SatelliteParams &p) {
  const UnitQuaternion qf = axis_angle_to_quaternion(
      {Vec3(1, 1, 1).normalized(), 60.0 * kPi / 180.0});
  const ScpResult r =
      solve_min_time(UnitQuaternion::identity(), qf, p, ScpConfig{});
  Outcome out;
  out.pass = r.converged && r.iterations <= 20 &&
             r.history.back().J_vc <= 1e-5 && r.history.back().J_tr <= 1e-5;
  std::ostringstream ss;
  ss << "60 deg about (1,1,1)/sqrt(3): flag = " << r.converged
     << ", iterations = " << r.iterations << " (want <= 20), final J_vc = "
     << r.history.back().J_vc << ", J_tr = " << r.history.back().J_tr
     << " (want <= 1e-5 each)";
  out.detail = ss.str();
  return out;
}

Outcome a7_desk_schedule(DeskScenario &desk) {
  Outcome out;
  if (!desk.schedule_ok) {
    out.detail = "desk scenario unavailable: " + desk.note;
    return out;
  }
  const ScpResult &r = desk.plan;
  if (r.failed_iteration > 0 || !r.converged) {
    out.detail = "multi-target solve did not converge: " + r.message;
    return out;
  }

  std::vector<GyrostatState> states(r.solution.states.begin(),
                                    r.solution.states.end());
  std::vector<ReferencePoint> points;
  for (const NodeTarget &t : desk.spec.targets) {
    if (t.attitude.has_value()) {
      points.push_back({t.node, *t.attitude, Vec3::Zero()});
    }
  }
  const ErrorMetrics m = error_metrics(states, points);

  const Trajectory replay = replay_nonlinear(r.solution, desk.p);
  double replay_err = 0.0;
  for (int k = 0; k < r.solution.num_nodes(); ++k) {
    replay_err = std::max(
        replay_err, (replay.samples[static_cast<size_t>(10 * k)].state
                         .to_vector() -
                     r.solution.states[static_cast<size_t>(k)].to_vector())
                        .lpNorm<Eigen::Infinity>());
  }

  out.pass = r.history.back().J_vc <= 1e-3 && r.history.back().J_tr <= 1e-4 &&
             m.q_e_avg <= 5e-3 && replay_err <= 1e-4;
  std::ostringstream ss;
  ss << desk.observations << " observations over 120 s (K = 121): J_vc = "
     << r.history.back().J_vc << " (<= 1e-3), J_tr = "
     << r.history.back().J_tr << " (<= 1e-4), q_e_avg = " << m.q_e_avg
     << " (<= 5e-3), replay node error = " << replay_err << " (<= 1e-4)";
  out.detail = ss.str();
  return out;
}

Outcome a8_feasibility_replay(Campaign &camp) {
  Outcome out;
  out.pass = true;
  double worst_att = 0, worst_rate = 0;
  int count = 0;
  for (int axis : {0, 2}) {
    const Vec3 ax = axis == 0 ? Vec3(1, 0, 0) : Vec3(0, 0, 1);
    for (const SlewCase &c : camp.axis_cases(axis)) {
      if (!c.result.converged) continue;
      ++count;
      const UnitQuaternion qf =
          axis_angle_to_quaternion({ax, c.angle_deg * kPi / 180.0});
      const Trajectory replay = replay_nonlinear(c.result.solution, camp.p);
      const GyrostatState &end = replay.samples.back().state;
      const double att_deg =
          rotation_angle(error_quaternion(end.q, qf)) * 180.0 / kPi;
      const double rate = end.omega.norm();
      worst_att = std::max(worst_att, att_deg);
      worst_rate = std::max(worst_rate, rate);
      out.pass = out.pass && att_deg <= 0.1 && rate <= 1e-3;
    }
  }
  std::ostringstream ss;
  ss << count
     << " converged slews re-integrated: worst terminal attitude error "
     << worst_att << " deg (<= 0.1), worst terminal rate " << worst_rate
     << " rad/s (<= 1e-3)";
  out.detail = ss.str();
  return out;
}

Outcome a9_tracking_direction(DeskScenario &desk) {
  Outcome out;
  if (!desk.schedule_ok || desk.plan.failed_iteration > 0 ||
      !desk.plan.converged) {
    out.detail = "desk scenario unavailable: " + desk.note;
    return out;
  }
  Mat3 Jt;
  Jt << 15.0, -1.0, 2.0,  //
      -1.0, 7.0, -3.0,    //
      2.0, -3.0, 9.0;
  const SatelliteParams p_true = SatelliteParams::validated(
      Jt, desk.p.Ar, desk.p.r_max, desk.p.u_max, desk.p.Jr);

  const DecisionStack &ref = desk.plan.solution;
  const GainSchedule gains = design_tracking_gains(
      ref, desk.p, LqrWeights::defaults(), desk.obs_nodes);
  const Trajectory ol =
      simulate_tracking(ref, gains, p_true, TrackingMode::open_loop);
  const Trajectory cl =
      simulate_tracking(ref, gains, p_true, TrackingMode::closed_loop);

  std::vector<GyrostatState> so, sc;
  for (const auto &s : ol.samples) so.push_back(s.state);
  for (const auto &s : cl.samples) sc.push_back(s.state);

  const auto all_points = reference_points(ref);
  const ErrorMetrics mo = error_metrics(so, all_points);
  const ErrorMetrics mc = error_metrics(sc, all_points);

  // attitude-error accumulation: the worst open-loop miss over the
  // observation set lands on the final observation
  std::vector<ReferencePoint> obs_points;
  for (int n : desk.obs_nodes) {
    obs_points.push_back({n, ref.states[static_cast<size_t>(n)].q,
                          ref.states[static_cast<size_t>(n)].omega});
  }
  const ErrorMetrics mo_obs = error_metrics(so, obs_points);

  const double ratio = mo.q_e_max / std::max(mc.q_e_max, 1e-300);
  out.pass = mc.q_e_max <= mo.q_e_max / 5.0 && mc.w_e_max < mo.w_e_max &&
             mo_obs.argmax_node == desk.obs_nodes.back();
  std::ostringstream ss;
  ss << "perturbed-inertia tracking vs reference: OL q_e_max = " << mo.q_e_max
     << ", CL q_e_max = " << mc.q_e_max << " (ratio " << ratio
     << ", want >= 5), OL w_e_max = " << mo.w_e_max << " vs CL " << mc.w_e_max
     << " (want CL smaller), OL attitude argmax at observation node "
     << mo_obs.argmax_node << " (want " << desk.obs_nodes.back() << ")";
  out.detail = ss.str();
  return out;
}

// one hand-built cone program with its known answer
struct SocpCase {
  std::string name;
  ConeProgram program;
  double objective = 0;
  std::vector<std::pair<int, double>> solution;  // indices checked
};

std::vector<SocpCase> make_socp_suite() {
  std::vector<SocpCase> cases;
  auto add = [&](const std::string &name, ConeProgramBuilder &bld,
                 double obj, std::vector<std::pair<int, double>> sol) {
    cases.push_back({name, bld.build(), obj, std::move(sol)});
  };

  {  // 1: scalar lower bound
    ConeProgramBuilder b(1);
    b.set_objective(0, 1.0);
    b.mark_zero_rows_end();
    b.add_row({{0, -1.0}}, -3.0);
    add("min x, x >= 3", b, 3.0, {{0, 3.0}});
  }
  {  // 2: scalar upper bound
    ConeProgramBuilder b(1);
    b.set_objective(0, -1.0);
    b.mark_zero_rows_end();
    b.add_row({{0, 1.0}}, 5.0);
    add("max x, x <= 5", b, -5.0, {{0, 5.0}});
  }
  {  // 3: separable corner
    ConeProgramBuilder b(2);
    b.set_objective(0, 1.0);
    b.set_objective(1, 1.0);
    b.mark_zero_rows_end();
    b.add_row({{0, -1.0}}, -1.0);
    b.add_row({{1, -1.0}}, -2.0);
    add("corner (1,2)", b, 3.0, {{0, 1.0}, {1, 2.0}});
  }
  {  // 4: equality + orthant vertex
    ConeProgramBuilder b(2);
    b.set_objective(0, 2.0);
    b.set_objective(1, 3.0);
    b.add_row({{0, 1.0}, {1, 1.0}}, 4.0);
    b.mark_zero_rows_end();
    b.add_row({{0, -1.0}}, 0.0);
    b.add_row({{1, -1.0}}, 0.0);
    add("vertex of x+y=4, x,y >= 0", b, 8.0, {{0, 4.0}, {1, 0.0}});
  }
  {  // 5: bounded polytope corner
    ConeProgramBuilder b(2);
    b.set_objective(0, -1.0);
    b.set_objective(1, -2.0);
    b.mark_zero_rows_end();
    b.add_row({{0, 1.0}, {1, 1.0}}, 4.0);
    b.add_row({{0, 1.0}}, 2.0);
    b.add_row({{0, -1.0}}, 0.0);
    b.add_row({{1, -1.0}}, 0.0);
    add("polytope corner (0,4)", b, -8.0, {{0, 0.0}, {1, 4.0}});
  }
  {  // 6: box corner
    ConeProgramBuilder b(2);
    b.set_objective(0, -1.0);
    b.set_objective(1, -1.0);
    b.mark_zero_rows_end();
    b.add_row({{0, -1.0}}, 0.0);
    b.add_row({{0, 1.0}}, 1.0);
    b.add_row({{1, -1.0}}, 0.0);
    b.add_row({{1, 1.0}}, 2.0);
    add("box corner (1,2)", b, -3.0, {{0, 1.0}, {1, 2.0}});
  }
  {  // 7: duplicated inequality rows
    ConeProgramBuilder b(1);
    b.set_objective(0, 1.0);
    b.mark_zero_rows_end();
    b.add_row({{0, -1.0}}, -1.0);
    b.add_row({{0, -1.0}}, -1.0);
    add("duplicated bound rows", b, 1.0, {{0, 1.0}});
  }
  {  // 8: duplicated equality rows (rank-deficient but consistent)
    ConeProgramBuilder b(2);
    b.set_objective(0, 1.0);
    b.add_row({{0, 1.0}, {1, 1.0}}, 2.0);
    b.add_row({{0, 1.0}, {1, 1.0}}, 2.0);
    b.mark_zero_rows_end();
    b.add_row({{0, -1.0}}, 0.0);
    b.add_row({{1, 1.0}}, 5.0);
    add("duplicated equality rows", b, 0.0, {{0, 0.0}, {1, 2.0}});
  }
  {  // 9: norm over a line
    ConeProgramBuilder b(3);
    b.set_objective(2, 1.0);
    b.add_row({{0, 1.0}, {1, 1.0}}, 2.0);
    b.mark_zero_rows_end();
    b.mark_nonneg_rows_end();
    b.begin_soc();
    b.add_row({{2, -1.0}}, 0.0);
    b.add_row({{0, -1.0}}, 0.0);
    b.add_row({{1, -1.0}}, 0.0);
    b.end_soc();
    add("min norm on x+y=2", b, std::sqrt(2.0), {{0, 1.0}, {1, 1.0}});
  }
  {  // 10: distance to a point
    ConeProgramBuilder b(3);
    b.set_objective(2, 1.0);
    b.add_row({{0, 1.0}}, 0.0);
    b.add_row({{1, 1.0}}, 0.0);
    b.mark_zero_rows_end();
    b.mark_nonneg_rows_end();
    b.begin_soc();
    b.add_row({{2, -1.0}}, 0.0);
    b.add_row({{0, -1.0}}, -3.0);
    b.add_row({{1, -1.0}}, -4.0);
    b.end_soc();
    add("distance to (3,4)", b, 5.0, {{2, 5.0}});
  }
  {  // 11: projection onto the orthant
    ConeProgramBuilder b(3);
    b.set_objective(2, 1.0);
    b.mark_zero_rows_end();
    b.add_row({{0, -1.0}}, 0.0);
    b.add_row({{1, -1.0}}, 0.0);
    b.mark_nonneg_rows_end();
    b.begin_soc();
    b.add_row({{2, -1.0}}, 0.0);
    b.add_row({{0, -1.0}}, 1.0);
    b.add_row({{1, -1.0}}, -2.0);
    b.end_soc();
    add("projection of (-1,2) onto x >= 0", b, 1.0,
        {{0, 0.0}, {1, 2.0}, {2, 1.0}});
  }
  {  // 12: capped epigraph
    ConeProgramBuilder b(2);  // x, v
    b.set_objective(0, -1.0);
    b.mark_zero_rows_end();
    b.add_row({{1, 1.0}}, 2.0);  // v <= 2
    b.mark_nonneg_rows_end();
    b.begin_soc();
    b.add_row({{1, -1.0}}, 0.0);
    b.add_row({{0, -1.0}}, 0.0);
    b.add_row({}, 1.0);  // constant second component
    b.end_soc();
    add("max x with ||(x,1)|| <= 2", b, -std::sqrt(3.0),
        {{0, std::sqrt(3.0)}});
  }
  {  // 13: Chebyshev radius of the unit square
    ConeProgramBuilder b(3);  // x, y, r
    b.set_objective(2, -1.0);
    b.mark_zero_rows_end();
    b.add_row({{0, 1.0}, {2, 1.0}}, 1.0);
    b.add_row({{0, -1.0}, {2, 1.0}}, 1.0);
    b.add_row({{1, 1.0}, {2, 1.0}}, 1.0);
    b.add_row({{1, -1.0}, {2, 1.0}}, 1.0);
    add("Chebyshev radius of a square", b, -1.0, {{2, 1.0}});
  }
  {  // 14: least squares via a cone (normal-equations oracle inline)
    // rows of A: (1,0), (0,2), (1,1); b = (1,2,3); solution of A'A x = A'b
    // A'A = [[2,1],[1,5]], A'b = (4,7) -> x = (13, 10)/9
    ConeProgramBuilder b(3);  // x1, x2, t
    b.set_objective(2, 1.0);
    b.mark_zero_rows_end();
    b.mark_nonneg_rows_end();
    b.begin_soc();
    b.add_row({{2, -1.0}}, 0.0);
    b.add_row({{0, -1.0}}, -1.0);
    b.add_row({{1, -2.0}}, -2.0);
    b.add_row({{0, -1.0}, {1, -1.0}}, -3.0);
    b.end_soc();
    const double x1 = 13.0 / 9.0, x2 = 10.0 / 9.0;
    const double r1 = x1 - 1, r2 = 2 * x2 - 2, r3 = x1 + x2 - 3;
    add("least squares", b, std::sqrt(r1 * r1 + r2 * r2 + r3 * r3),
        {{0, x1}, {1, x2}});
  }
  {  // 15: equalities only
    ConeProgramBuilder b(3);
    b.set_objective(0, 1.0);
    b.set_objective(1, 1.0);
    b.set_objective(2, 1.0);
    b.add_row({{0, 1.0}}, 1.0);
    b.add_row({{1, 1.0}}, 2.0);
    b.add_row({{2, 1.0}}, 3.0);
    add("pinned by equalities", b, 6.0, {{0, 1.0}, {1, 2.0}, {2, 3.0}});
  }
  {  // 16: sum of distances to two points (degenerate argmin, unique value)
    ConeProgramBuilder b(4);  // x1, x2, t1, t2
    b.set_objective(2, 1.0);
    b.set_objective(3, 1.0);
    b.mark_zero_rows_end();
    b.mark_nonneg_rows_end();
    b.begin_soc();
    b.add_row({{2, -1.0}}, 0.0);
    b.add_row({{0, -1.0}}, 0.0);
    b.add_row({{1, -1.0}}, 0.0);
    b.end_soc();
    b.begin_soc();
    b.add_row({{3, -1.0}}, 0.0);
    b.add_row({{0, -1.0}}, -3.0);
    b.add_row({{1, -1.0}}, -4.0);
    b.end_soc();
    add("two-point Steiner value", b, 5.0, {});
  }
  {  // 17: median of three collinear points
    ConeProgramBuilder b(4);  // x, t1, t2, t3   (1-d distances)
    b.set_objective(1, 1.0);
    b.set_objective(2, 1.0);
    b.set_objective(3, 1.0);
    b.mark_zero_rows_end();
    b.mark_nonneg_rows_end();
    const double pts[3] = {0.0, 1.0, 4.0};
    for (int i = 0; i < 3; ++i) {
      b.begin_soc();
      b.add_row({{i + 1, -1.0}}, 0.0);
      b.add_row({{0, -1.0}}, -pts[i]);
      b.end_soc();
    }
    add("median of {0,1,4}", b, 4.0, {{0, 1.0}});
  }
  {  // 18: floor from a constant cone component
    ConeProgramBuilder b(2);  // x, y
    b.set_objective(1, 1.0);
    b.mark_zero_rows_end();
    b.mark_nonneg_rows_end();
    b.begin_soc();
    b.add_row({{1, -1.0}}, 0.0);
    b.add_row({{0, -1.0}}, 0.0);
    b.add_row({}, 0.5);
    b.end_soc();
    add("min y >= ||(x, 0.5)||", b, 0.5, {{0, 0.0}, {1, 0.5}});
  }
  {  // 19: badly scaled data (equilibration path)
    ConeProgramBuilder b(1);
    b.set_objective(0, 1e6);
    b.mark_zero_rows_end();
    b.add_row({{0, -1e3}}, -3e-3);
    add("badly scaled bound", b, 3.0, {{0, 3e-6}});
  }
  {  // 20: linear objective over a disk
    ConeProgramBuilder b(3);  // x, y, t (t capped at 1)
    b.set_objective(0, 1.0);
    b.set_objective(1, 1.0);
    b.mark_zero_rows_end();
    b.add_row({{2, 1.0}}, 1.0);
    b.mark_nonneg_rows_end();
    b.begin_soc();
    b.add_row({{2, -1.0}}, 0.0);
    b.add_row({{0, -1.0}}, -1.0);
    b.add_row({{1, -1.0}}, -1.0);
    b.end_soc();
    const double v = 1.0 - 1.0 / std::sqrt(2.0);
    add("support point of a disk", b, 2.0 - std::sqrt(2.0),
        {{0, v}, {1, v}});
  }
  {  // 21: symmetric allocation in a 5-dim cone
    ConeProgramBuilder b(5);  // x1..x4, t
    b.set_objective(4, 1.0);
    b.add_row({{0, 1.0}, {1, 1.0}, {2, 1.0}, {3, 1.0}}, 4.0);
    b.mark_zero_rows_end();
    b.mark_nonneg_rows_end();
    b.begin_soc();
    b.add_row({{4, -1.0}}, 0.0);
    for (int i = 0; i < 4; ++i) b.add_row({{i, -1.0}}, 0.0);
    b.end_soc();
    add("symmetric norm allocation", b, 2.0,
        {{0, 1.0}, {1, 1.0}, {2, 1.0}, {3, 1.0}, {4, 2.0}});
  }
  {  // 22: equalities intersect the cone at one point
    ConeProgramBuilder b(3);
    b.set_objective(2, 1.0);
    b.add_row({{0, 1.0}, {1, 1.0}}, 2.0);
    b.add_row({{0, 1.0}, {1, -1.0}}, 0.0);
    b.mark_zero_rows_end();
    b.mark_nonneg_rows_end();
    b.begin_soc();
    b.add_row({{2, -1.0}}, 0.0);
    b.add_row({{0, -1.0}}, 0.0);
    b.add_row({{1, -1.0}}, 0.0);
    b.end_soc();
    add("pinned norm argument", b, std::sqrt(2.0), {{0, 1.0}, {1, 1.0}});
  }
  {  // 23: redundant inactive rows
    ConeProgramBuilder b(1);
    b.set_objective(0, 1.0);
    b.mark_zero_rows_end();
    b.add_row({{0, -1.0}}, 5.0);   // x >= -5
    b.add_row({{0, -1.0}}, -2.0);  // x >= 2
    b.add_row({{0, 1.0}}, 10.0);   // x <= 10
    add("redundant bounds", b, 2.0, {{0, 2.0}});
  }
  {  // 24: dual-degenerate face (objective parallel to a constraint)
    ConeProgramBuilder b(2);
    b.set_objective(0, 1.0);
    b.set_objective(1, 1.0);
    b.mark_zero_rows_end();
    b.add_row({{0, -1.0}, {1, -1.0}}, -1.0);  // x+y >= 1
    b.add_row({{0, -1.0}}, 0.0);
    b.add_row({{1, -1.0}}, 0.0);
    add("degenerate optimal face", b, 1.0, {});
  }
  {  // 25: scalar distance with a linear cap
    ConeProgramBuilder b(2);  // x, t
    b.set_objective(1, 1.0);
    b.mark_zero_rows_end();
    b.add_row({{0, 1.0}}, 1.0);  // x <= 1
    b.mark_nonneg_rows_end();
    b.begin_soc();
    b.add_row({{1, -1.0}}, 0.0);
    b.add_row({{0, -1.0}}, -2.0);
    b.end_soc();
    add("capped scalar distance", b, 1.0, {{0, 1.0}, {1, 1.0}});
  }
  return cases;
}

Outcome a10_solver_suite() {
  const auto cases = make_socp_suite();
  Outcome out;
  out.pass = true;
  int failures = 0;
  std::string first_failure;
  SolverSettings settings = ScpConfig::scp_solver_defaults();
  for (const SocpCase &c : cases) {
    const ConeSolution sol = solve_cone_program(c.program, settings);
    bool ok = sol.status == SolveStatus::optimal && sol.gap <= 1e-8;
    // the objective inherits the solution tolerance through ||c||
    const double obj_tol =
        1e-6 * std::max(1.0, std::abs(c.objective) +
                                 c.program.c.lpNorm<Eigen::Infinity>());
    ok = ok && std::abs(sol.objective - c.objective) <= obj_tol;
    for (const auto &[idx, val] : c.solution) {
      ok = ok && std::abs(sol.x(idx) - val) <= 1e-6;
    }
    if (!ok) {
      ++failures;
      if (first_failure.empty()) first_failure = c.name;
    }
  }
  out.pass = failures == 0;
  std::ostringstream ss;
  ss << cases.size() << " hand-built cone programs at gap <= 1e-8, "
     << "solution error <= 1e-6: " << failures << " failures";
  if (failures > 0) ss << " (first: " << first_failure << ")";
  out.detail = ss.str();
  return out;
}

Mat11 expm_series_11(const Mat11 &m) {
  int scale = 0;
  double nrm = m.cwiseAbs().rowwise().sum().maxCoeff();
  while (nrm > 0.25) {
    nrm *= 0.5;
    ++scale;
  }
  const Mat11 ms = m / std::pow(2.0, scale);
  Mat11 term = Mat11::Identity();
  Mat11 sum = Mat11::Identity();
  for (int k = 1; k <= 24; ++k) {
    term = term * ms / k;
    sum += term;
  }
  for (int i = 0; i < scale; ++i) sum = sum * sum;
  return sum;
}

Outcome a11_discretization_oracles(const SatelliteParams &p) {
  // frozen linearization: rest state with stored rotor momentum is an
  // equilibrium, so the discrete A must be the matrix exponential
  const int K = 30;
  const double tf = 8.0;
  DecisionStack nominal;
  nominal.t_f = tf;
  nominal.states.resize(K);
  nominal.inputs.assign(K, ControlInput::Zero());
  for (int k = 0; k < K; ++k) {
    nominal.states[k] = GyrostatState::rest(UnitQuaternion::identity());
    nominal.states[k].rotor_momentum = Vec4(0.4, -0.2, 0.3, 0.1);
  }
  const DiscreteLtvSystem sys = discretize_foh(nominal, p);
  const auto jac = normalized_jacobians(nominal.states[0],
                                        ControlInput::Zero(), tf, p);
  const Mat11 expected = expm_series_11(jac.A / (K - 1));
  double expm_err = 0.0;
  for (int k = 0; k + 1 < K; ++k) {
    expm_err = std::max(expm_err,
                        (sys.A[static_cast<size_t>(k)] - expected)
                            .lpNorm<Eigen::Infinity>());
  }

  // integrator order: step-halving on a smooth maneuver
  GyrostatState x0 = GyrostatState::rest(UnitQuaternion::identity());
  x0.omega = Vec3(0.05, -0.03, 0.08);
  x0.rotor_momentum = Vec4(0.1, -0.2, 0.15, 0.05);
  const double T = 6.0;
  auto u_of_t = [&](double t) {
    return ControlInput(0.04 * std::sin(kPi * t / T),
                        -0.03 * std::cos(2.0 * t / T),
                        0.05 * std::sin(2.5 * t / T), 0.02 * std::cos(t / T));
  };
  const Vec11 ref =
      rk4_integrate(x0, u_of_t, 0.0, T, 3200, p).samples.back().state
          .to_vector();
  const double e1 =
      (rk4_integrate(x0, u_of_t, 0.0, T, 50, p).samples.back().state
           .to_vector() -
       ref)
          .norm();
  const double e2 =
      (rk4_integrate(x0, u_of_t, 0.0, T, 100, p).samples.back().state
           .to_vector() -
       ref)
          .norm();
  const double slope = std::log2(e1 / e2);

  Outcome out;
  out.pass = expm_err <= 1e-9 && slope >= 3.8 && slope <= 4.2;
  std::ostringstream ss;
  ss << "frozen-dynamics A_k vs matrix exponential: " << expm_err
     << " (<= 1e-9); step-halving convergence slope " << slope
     << " (want 4.0 +- 0.2)";
  out.detail = ss.str();
  return out;
}

Outcome a12_riccati_oracle() {
  std::mt19937 rng(77);
  std::normal_distribution<double> g(0.0, 1.0);
  int failures = 0;
  double worst = 0.0;

  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 3);
    const int m = 1 + static_cast<int>(rng() % 2);
    const int N = 3 + static_cast<int>(rng() % 8);

    MatX A(n, n), B(n, m), Mq(n, n);
    for (int i = 0; i < n * n; ++i) A(i / n, i % n) = 0.6 * g(rng);
    for (int i = 0; i < n * m; ++i) B(i / m, i % m) = g(rng);
    for (int i = 0; i < n * n; ++i) Mq(i / n, i % n) = g(rng);
    const MatX Q = Mq.transpose() * Mq + 0.1 * MatX::Identity(n, n);
    const MatX R = MatX::Identity(m, m);
    const MatX QK = 2.0 * Q;
    const double alpha = 5.0;
    const std::vector<int> observed{N / 2};

    std::vector<MatX> Ad(N - 1, A), Bd(N - 1, B);
    const auto gains = riccati_gains(Ad, Bd, Q, R, QK, alpha, observed);

    VecX x0(n);
    for (int i = 0; i < n; ++i) x0(i) = g(rng);
    auto Qk = [&](int k) {
      return (k == observed[0]) ? (alpha * Q).eval() : Q;
    };

    double J_lqr = 0.0;
    VecX x = x0;
    for (int k = 0; k + 1 < N; ++k) {
      const VecX u = -gains[static_cast<size_t>(k)] * x;
      J_lqr += x.dot(Qk(k) * x) + u.dot(R * u);
      x = A * x + B * u;
    }
    J_lqr += x.dot(QK * x);

    const int nu = m * (N - 1);
    MatX Su = MatX::Zero(n * N, nu);
    MatX Sx = MatX::Zero(n * N, n);
    MatX phi = MatX::Identity(n, n);
    Sx.topRows(n) = phi;
    for (int k = 1; k < N; ++k) {
      phi = A * phi;
      Sx.middleRows(k * n, n) = phi;
      for (int j = 0; j < k; ++j) {
        MatX blk = B;
        for (int step = j + 1; step < k; ++step) blk = A * blk;
        Su.block(k * n, j * m, n, m) = blk;
      }
    }
    MatX Qbig = MatX::Zero(n * N, n * N);
    for (int k = 0; k + 1 < N; ++k) Qbig.block(k * n, k * n, n, n) = Qk(k);
    Qbig.bottomRightCorner(n, n) = QK;
    MatX Rbig = MatX::Zero(nu, nu);
    for (int k = 0; k + 1 < N; ++k) Rbig.block(k * m, k * m, m, m) = R;
    const MatX H = Su.transpose() * Qbig * Su + Rbig;
    const VecX f = Su.transpose() * Qbig * Sx * x0;
    const VecX u_qp = -H.ldlt().solve(f);
    const VecX xs = Sx * x0 + Su * u_qp;
    const double J_qp = xs.dot(Qbig * xs) + u_qp.dot(Rbig * u_qp);

    const double err =
        std::abs(J_lqr - J_qp) / std::max(1.0, std::abs(J_qp));
    worst = std::max(worst, err);
    if (err > 1e-8) ++failures;
  }

  Outcome out;
  out.pass = failures == 0;
  std::ostringstream ss;
  ss << "20 random finite-horizon instances: recursion cost vs dense QP, "
        "worst relative difference "
     << worst << " (<= 1e-8), " << failures << " failures";
  out.detail = ss.str();
  return out;
}

}  // namespace

int main(int argc, char **argv) {
  std::set<std::string> selected;
  for (int i = 1; i < argc; ++i) selected.insert(argv[i]);
  auto wanted = [&](const std::string &id) {
    return selected.empty() || selected.count(id) > 0;
  };

  Campaign camp;
  DeskScenario desk;
  auto desk_ref = [&]() -> DeskScenario & {
    if (!desk.built) desk = build_desk_scenario();
    return desk;
  };

  const std::vector<std::pair<std::string, std::function<Outcome()>>>
      criteria{
          {"A1", [&] { return a1_principal_axis_times(camp); }},
          {"A2", [&] { return a2_x_axis_power_fit(camp); }},
          {"A3", [&] { return a3_z_axis_coefficient(camp); }},
          {"A4", [&] { return a4_energy_linearity(camp); }},
          {"A5", [&] { return a5_bang_bang(camp); }},
          {"A6", [&] { return a6_scp_bookkeeping(camp.p); }},
          {"A7", [&] { return a7_desk_schedule(desk_ref()); }},
          {"A8", [&] { return a8_feasibility_replay(camp); }},
          {"A9", [&] { return a9_tracking_direction(desk_ref()); }},
          {"A10", [] { return a10_solver_suite(); }},
          {"A11", [&] { return a11_discretization_oracles(camp.p); }},
          {"A12", [] { return a12_riccati_oracle(); }},
      };

  int failures = 0;
  for (const auto &[id, fn] : criteria) {
    if (!wanted(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = fn();
    } catch (const std::exception &e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    std::printf("[%s] %-4s %s (%.1f s)\n", out.pass ? "PASS" : "FAIL",
                id.c_str(), out.detail.c_str(), wall_since(t0));
    std::fflush(stdout);
    if (!out.pass) ++failures;
  }
  if (selected.empty()) {
    std::printf("%d of 12 criteria passed\n", 12 - failures);
  }
  return failures;
}
