#include "attopt/scp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"

namespace attopt {

std::string ScpResult::history_json() const {
  nlohmann::json j = nlohmann::json::array();
  for (const auto &rec : history) {
    j.push_back({{"iteration", rec.iteration},
                 {"J_vc", rec.J_vc},
                 {"J_tr", rec.J_tr},
                 {"objective", rec.objective},
                 {"t_f", rec.t_f}});
  }
  return j.dump(2);
}

DecisionStack initial_guess(const UnitQuaternion &q0, const UnitQuaternion &qf,
                            int K, double t_f_guess) {
  DecisionStack stack;
  stack.states.resize(K);
  stack.inputs.assign(K, ControlInput::Zero());
  for (int k = 0; k < K; ++k) {
    const double t = static_cast<double>(k) / (K - 1);
    stack.states[k] = GyrostatState::rest(slerp(q0, qf, t));
  }
  stack.t_f = t_f_guess;
  return stack;
}

DecisionStack initial_guess_schedule(const UnitQuaternion &q0,
                                     const PointingScheduleSpec &spec, int K) {
  // waypoints: scheduled attitudes in node order, starting at the
  // initial attitude
  std::vector<std::pair<int, UnitQuaternion>> waypoints;
  waypoints.emplace_back(0, q0);
  for (const NodeTarget &t : spec.targets) {
    if (t.attitude.has_value() && t.node > waypoints.back().first) {
      waypoints.emplace_back(t.node, *t.attitude);
    }
  }

  DecisionStack stack;
  stack.states.resize(K);
  stack.inputs.assign(K, ControlInput::Zero());
  size_t seg = 0;
  for (int k = 0; k < K; ++k) {
    while (seg + 1 < waypoints.size() && waypoints[seg + 1].first <= k) {
      ++seg;
    }
    UnitQuaternion q;
    if (seg + 1 >= waypoints.size()) {
      q = waypoints.back().second;  // hold past the last waypoint
    } else {
      const auto &[k0, qa] = waypoints[seg];
      const auto &[k1, qb] = waypoints[seg + 1];
      const double t = static_cast<double>(k - k0) / (k1 - k0);
      q = slerp(qa, qb, t);
    }
    stack.states[k] = GyrostatState::rest(q);
  }
  stack.t_f = spec.t_f;
  return stack;
}

double default_tf_guess(const UnitQuaternion &q0, const UnitQuaternion &qf,
                        const SatelliteParams &p) {
  const double theta = rotation_angle(error_quaternion(qf, q0));
  double tau_min = std::numeric_limits<double>::infinity();
  for (int axis = 0; axis < 3; ++axis) {
    tau_min =
        std::min(tau_min, p.Ar.row(axis).cwiseAbs().sum() * p.u_max);
  }
  Eigen::SelfAdjointEigenSolver<Mat3> es(p.J);
  const double j_max = es.eigenvalues().maxCoeff();
  const double t = 2.0 * std::sqrt(std::max(theta, 1e-3) * j_max / tau_min);
  return std::max(1.0, 1.2 * t);
}

Penalties evaluate_penalties(const DecisionStack &current,
                             const DecisionStack &previous,
                             const ScpConfig &cfg, const ScalingMap &scaling,
                             bool include_tf) {
  if (current.num_nodes() != previous.num_nodes()) {
    throw std::invalid_argument("evaluate_penalties: node count mismatch");
  }
  Penalties out;
  for (const Vec11 &v : current.virtual_controls_scaled) {
    out.J_vc += cfg.w_vc * v.lpNorm<1>();
  }
  const bool physical = cfg.transcription().tr_physical_units;
  for (int k = 0; k < current.num_nodes(); ++k) {
    Eigen::Matrix<double, 15, 1> dz;
    dz.head<11>() =
        current.states[k].to_vector() - previous.states[k].to_vector();
    dz.tail<4>() = current.inputs[k] - previous.inputs[k];
    if (!physical) {
      dz.head<11>() = dz.head<11>().cwiseQuotient(scaling.x_scale);
      dz.tail<4>() = dz.tail<4>().cwiseQuotient(scaling.u_scale);
    }
    out.J_tr += (cfg.w_tr * dz).norm();
  }
  if (include_tf) {
    double dt = current.t_f - previous.t_f;
    if (!physical) dt /= scaling.t_scale;
    out.J_tr += cfg.w_tr * std::abs(dt);
  }
  return out;
}

namespace {

struct IterationOutcome {
  bool solver_failed = false;
  SolveStatus status = SolveStatus::optimal;
  DecisionStack solution;
  double objective = 0.0;
};

IterationOutcome run_subproblem(const TranscribedProblem &prob,
                                const ScpConfig &cfg,
                                const ScalingMap &scaling, double fixed_tf) {
  IterationOutcome out;
  const ConeSolution sol = solve_cone_program(prob.program, cfg.solver);
  out.status = sol.status;
  if (sol.status != SolveStatus::optimal) {
    out.solver_failed = true;
    return out;
  }
  out.solution = extract_solution(sol, prob.map, scaling, fixed_tf);
  out.objective = sol.objective;
  return out;
}

}  // namespace

ScpResult solve_min_time(const UnitQuaternion &q0, const UnitQuaternion &qf,
                         const SatelliteParams &p, const ScpConfig &cfg,
                         double t_f_guess) {
  const double t_guess =
      t_f_guess > 0.0 ? t_f_guess : default_tf_guess(q0, qf, p);
  const ScalingMap scaling = ScalingMap::from_params(p, t_guess);
  const TranscriptionConfig tcfg = cfg.transcription();
  const MinTimeBoundary bc{q0, qf};

  ScpResult result;
  DecisionStack nominal = initial_guess(q0, qf, cfg.K, t_guess);

  for (int i = 1; i <= cfg.N_max; ++i) {
    const DiscreteLtvSystem ltv =
        discretize_foh(nominal, p, cfg.foh_substeps);
    const TranscribedProblem prob =
        assemble_min_time(nominal, ltv, bc, p, tcfg, scaling);
    const IterationOutcome it = run_subproblem(prob, cfg, scaling, 0.0);
    result.iterations = i;
    result.last_solver_status = it.status;
    if (it.solver_failed) {
      result.failed_iteration = i;
      result.message = "subproblem solver returned " + to_string(it.status) +
                       " at iteration " + std::to_string(i);
      result.solution = nominal;
      result.t_f = nominal.t_f;
      return result;
    }
    const Penalties pen =
        evaluate_penalties(it.solution, nominal, cfg, scaling, true);
    result.history.push_back(
        {i, pen.J_vc, pen.J_tr, it.objective, it.solution.t_f});
    nominal = it.solution;
    if (pen.J_vc <= cfg.eps_vc && pen.J_tr <= cfg.eps_tr) {
      result.converged = true;
      break;
    }
  }
  result.solution = nominal;
  result.t_f = nominal.t_f;
  return result;
}

ScpResult solve_multi_target(const PointingScheduleSpec &spec,
                             const GyrostatState &x_initial,
                             const SatelliteParams &p, const ScpConfig &cfg) {
  const ScalingMap scaling = ScalingMap::from_params(p, spec.t_f);
  const TranscriptionConfig tcfg = cfg.transcription();

  ScpResult result;
  DecisionStack nominal = initial_guess_schedule(x_initial.q, spec, cfg.K);
  nominal.states[0] = x_initial;

  for (int i = 1; i <= cfg.N_max; ++i) {
    const DiscreteLtvSystem ltv =
        discretize_foh(nominal, p, cfg.foh_substeps);
    const TranscribedProblem prob = assemble_multi_target(
        nominal, ltv, spec, x_initial, p, tcfg, scaling);
    const IterationOutcome it =
        run_subproblem(prob, cfg, scaling, spec.t_f);
    result.iterations = i;
    result.last_solver_status = it.status;
    if (it.solver_failed) {
      result.failed_iteration = i;
      result.message = "subproblem solver returned " + to_string(it.status) +
                       " at iteration " + std::to_string(i);
      result.solution = nominal;
      result.t_f = spec.t_f;
      return result;
    }
    const Penalties pen =
        evaluate_penalties(it.solution, nominal, cfg, scaling, false);
    result.history.push_back(
        {i, pen.J_vc, pen.J_tr, it.objective, spec.t_f});
    nominal = it.solution;
    if (pen.J_vc <= cfg.eps_vc && pen.J_tr <= cfg.eps_tr) {
      result.converged = true;
      break;
    }
  }
  result.solution = nominal;
  result.t_f = spec.t_f;
  return result;
}

Trajectory stack_to_trajectory(const DecisionStack &stack) {
  Trajectory traj;
  const int K = stack.num_nodes();
  traj.samples.resize(K);
  for (int k = 0; k < K; ++k) {
    traj.samples[k].t = stack.t_f * k / (K - 1);
    traj.samples[k].state = stack.states[k];
    traj.samples[k].u = stack.inputs[k];
  }
  return traj;
}

Trajectory replay_nonlinear(const DecisionStack &stack,
                            const SatelliteParams &p,
                            int substeps_per_interval) {
  const int K = stack.num_nodes();
  std::vector<double> times(K);
  for (int k = 0; k < K; ++k) times[k] = stack.t_f * k / (K - 1);
  const FohSignal u_of_t(times, stack.inputs);
  return rk4_integrate(
      stack.states[0], [&](double t) { return u_of_t(t); }, 0.0, stack.t_f,
      substeps_per_interval * (K - 1), p);
}

}  // namespace attopt
