#ifndef ATTOPT_SCP_HPP
#define ATTOPT_SCP_HPP

#include <string>

#include "attopt/socp_solver.hpp"
#include "attopt/transcription.hpp"

namespace attopt {

struct ScpConfig {
  int K = 30;
  int N_max = 20;
  double w_vc = 1e5;
  double w_tr = 1e-1;
  double eps_vc = 1e-5;
  double eps_tr = 1e-5;
  double gamma = 1e5;  // multi-target angular-velocity weight
  double rho = 1.0;    // multi-target control-effort weight
  double t_f = 0.0;    // multi-target fixed final time, s
  double t_min_floor = 0.1;
  std::optional<double> omega_max;
  int foh_substeps = 10;
  // Subproblems are solved beyond the standalone defaults so that the
  // J_vc/J_tr convergence test sees solver-noise-free iterates.
  SolverSettings solver = scp_solver_defaults();

  static SolverSettings scp_solver_defaults() {
    SolverSettings s;
    s.gap_tol = 1e-10;
    s.rel_gap_tol = 1e-10;
    s.feas_tol = 1e-9;
    s.kkt_refinements = 3;
    return s;
  }

  TranscriptionConfig transcription() const {
    TranscriptionConfig t;
    t.w_vc = w_vc;
    t.w_tr = w_tr;
    t.t_min_floor = t_min_floor;
    t.omega_max = omega_max;
    t.foh_substeps = foh_substeps;
    return t;
  }
};

struct ScpIterationRecord {
  int iteration = 0;
  double J_vc = 0.0;
  double J_tr = 0.0;
  double objective = 0.0;
  double t_f = 0.0;
};

struct ScpResult {
  bool converged = false;  // Algorithm flag: 1 when both penalties pass
  int iterations = 0;
  std::vector<ScpIterationRecord> history;
  DecisionStack solution;
  double t_f = 0.0;
  SolveStatus last_solver_status = SolveStatus::optimal;
  int failed_iteration = 0;  // nonzero when a subproblem solve failed
  std::string message;

  std::string history_json() const;
};

/// SLERP attitude sweep with zero rates, momenta and torques.
DecisionStack initial_guess(const UnitQuaternion &q0, const UnitQuaternion &qf,
                            int K, double t_f_guess);

/// Piecewise-SLERP through the scheduled attitudes (multi-target guess).
DecisionStack initial_guess_schedule(const UnitQuaternion &q0,
                                     const PointingScheduleSpec &spec, int K);

/**
 * Conservative slew-duration estimate: the double-integrator time about
 * the weakest torque axis with the largest principal inertia, plus 20%.
 */
double default_tf_guess(const UnitQuaternion &q0, const UnitQuaternion &qf,
                        const SatelliteParams &p);

struct Penalties {
  double J_vc = 0.0;
  double J_tr = 0.0;
};

/**
 * Virtual-control and trust-region penalties of `current` against the
 * previous iterate, in scaled units. include_tf adds the final-time
 * column to each node deviation (free-final-time problems only).
 */
Penalties evaluate_penalties(const DecisionStack &current,
                             const DecisionStack &previous,
                             const ScpConfig &cfg, const ScalingMap &scaling,
                             bool include_tf);

/// Penalized-trust-region SCP on the free-final-time slew problem.
ScpResult solve_min_time(const UnitQuaternion &q0, const UnitQuaternion &qf,
                         const SatelliteParams &p, const ScpConfig &cfg,
                         double t_f_guess = 0.0);

/// Penalized-trust-region SCP on the fixed-time multi-target problem.
ScpResult solve_multi_target(const PointingScheduleSpec &spec,
                             const GyrostatState &x_initial,
                             const SatelliteParams &p, const ScpConfig &cfg);

/// Node times and first-order-hold input signal of a converged stack.
Trajectory stack_to_trajectory(const DecisionStack &stack);

/// Re-integrates the stack's FOH input through the nonlinear dynamics.
Trajectory replay_nonlinear(const DecisionStack &stack,
                            const SatelliteParams &p,
                            int substeps_per_interval = 10);

}  // namespace attopt

#endif
