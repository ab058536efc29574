#ifndef ATTOPT_TRANSCRIPTION_HPP
#define ATTOPT_TRANSCRIPTION_HPP

#include <optional>
#include <vector>

#include "attopt/cone_program.hpp"
#include "attopt/gyrostat.hpp"

namespace attopt {

/**
 * Exact first-order-hold discretization of the linearized, time-normalized
 * dynamics over K-1 equal intervals of tau in [0, 1]:
 *
 *   x_{k+1} = A_k x_k + Bm_k u_k + Bp_k u_{k+1} + Sigma_k t_f + e_k
 */
struct DiscreteLtvSystem {
  std::vector<Mat11> A;
  std::vector<Mat11x4> B_minus;
  std::vector<Mat11x4> B_plus;
  std::vector<Vec11> Sigma;
  std::vector<Vec11> offset;
  std::vector<double> tau;  // K strictly increasing nodes, 0 to 1

  int num_nodes() const { return static_cast<int>(tau.size()); }
};

/// Trajectory iterate: states and inputs at the K nodes plus the final
/// time. Virtual controls (scaled units) are attached to subproblem
/// solutions; nominals leave them empty.
struct DecisionStack {
  std::vector<GyrostatState> states;
  std::vector<ControlInput> inputs;
  double t_f = 0.0;
  std::vector<Vec11> virtual_controls_scaled;

  int num_nodes() const { return static_cast<int>(states.size()); }
};

/// Affine map between physical units and O(1) solver units.
struct ScalingMap {
  Vec11 x_scale = Vec11::Ones();
  Vec11 x_offset = Vec11::Zero();
  Vec4 u_scale = Vec4::Ones();
  Vec4 u_offset = Vec4::Zero();
  double t_scale = 1.0;
  double t_offset = 0.0;

  static ScalingMap from_params(const SatelliteParams &p, double t_reference);

  Vec11 scale_state(const Vec11 &x_phys) const {
    return (x_phys - x_offset).cwiseQuotient(x_scale);
  }
  Vec11 unscale_state(const Vec11 &x_scaled) const {
    return x_scaled.cwiseProduct(x_scale) + x_offset;
  }
  Vec4 scale_input(const Vec4 &u_phys) const {
    return (u_phys - u_offset).cwiseQuotient(u_scale);
  }
  Vec4 unscale_input(const Vec4 &u_scaled) const {
    return u_scaled.cwiseProduct(u_scale) + u_offset;
  }
  double scale_time(double t) const { return (t - t_offset) / t_scale; }
  double unscale_time(double t) const { return t * t_scale + t_offset; }

  DecisionStack scale(const DecisionStack &stack) const;
  DecisionStack unscale(const DecisionStack &stack) const;
};

struct TranscriptionConfig {
  double w_vc = 1e5;          // virtual-control penalty weight
  double w_tr = 1e-1;         // trust-region penalty weight
  // Trust-region deviations are measured on the physical z_k; the
  // scaling map then only conditions the subproblem numerically.
  bool tr_physical_units = true;
  double t_min_floor = 0.1;   // lower bound on t_f, s
  std::optional<double> omega_max;  // optional body-rate bound, rad/s
  int foh_substeps = 10;      // RK4 substeps per interval
};

/// Desired attitude/rate at a discretization node. Flanking rate-only
/// entries carry no attitude.
struct NodeTarget {
  int node = 0;
  std::optional<UnitQuaternion> attitude;
  std::optional<Vec3> body_rate;
};

/**
 * Observation set and weights for the fixed-time multi-target problem.
 * When eps_q/eps_omega are set the corresponding error terms turn into
 * hard constraints instead of objective penalties (infeasibility then
 * surfaces as the solver status).
 */
struct PointingScheduleSpec {
  std::vector<NodeTarget> targets;
  double t_f = 0.0;
  double gamma = 1e5;  // angular-velocity error weight
  double rho = 1.0;    // control-effort weight
  std::optional<double> eps_q;
  std::optional<double> eps_omega;
};

/// Variable layout of a transcribed problem (the canonicalization map).
struct TranscriptionMap {
  int K = 0;
  bool has_tf = false;
  int num_vars = 0;
  int tf_index = -1;
  int v_base = 0;
  int tr_base = 0;
  int tr_tf_index = -1;  // final-time trust-region epigraph (counted once)
  int u_epi_base = -1;           // multi-target only
  std::vector<int> q_epi_index;  // per target, -1 if absent
  std::vector<int> w_epi_index;

  int x_offset(int k) const { return 15 * k; }
  int u_offset(int k) const { return 15 * k + 11; }
  int vp_offset(int k) const { return v_base + 22 * k; }
  int vm_offset(int k) const { return v_base + 22 * k + 11; }
  int tr_index(int k) const { return tr_base + k; }
};

struct TranscribedProblem {
  ConeProgram program;
  TranscriptionMap map;
};

/**
 * Multiple-shooting FOH discretization: each interval integrates the
 * state, the inverse state transition matrix, and the four convolution
 * integrals with RK4 from the nominal node. Throws std::runtime_error
 * naming the interval when the integration produces non-finite values.
 */
DiscreteLtvSystem discretize_foh(const DecisionStack &nominal,
                                 const SatelliteParams &p, int substeps = 10);

/// Rest-to-rest boundary conditions for the minimum-time problem.
struct MinTimeBoundary {
  UnitQuaternion q_initial;
  UnitQuaternion q_final;
};

TranscribedProblem assemble_min_time(const DecisionStack &nominal,
                                     const DiscreteLtvSystem &ltv,
                                     const MinTimeBoundary &bc,
                                     const SatelliteParams &p,
                                     const TranscriptionConfig &cfg,
                                     const ScalingMap &scaling);

TranscribedProblem assemble_multi_target(const DecisionStack &nominal,
                                         const DiscreteLtvSystem &ltv,
                                         const PointingScheduleSpec &spec,
                                         const GyrostatState &x_initial,
                                         const SatelliteParams &p,
                                         const TranscriptionConfig &cfg,
                                         const ScalingMap &scaling);

/// One linearized power row: value = constant + du.u_k + dr.r_k (W).
struct LinearPowerRow {
  int node = 0;
  Vec4 du = Vec4::Zero();
  Vec4 dr = Vec4::Zero();
  double constant = 0.0;
};

/// Linearized total-energy row over all nodes (J).
struct LinearEnergyRow {
  std::vector<Vec4> du;
  std::vector<Vec4> dr;
  double dtf = 0.0;
  double constant = 0.0;
};

struct PowerEnergyRows {
  std::vector<LinearPowerRow> power;      // empty unless P_max is set
  std::optional<LinearEnergyRow> energy;  // absent unless E_max is set
};

/**
 * First-order convexification of the bilinear rotor power about the
 * nominal. |u_i r_i| uses the sign of the nominal product, with products
 * below 1e-9 treated as zero gradient. Exact at the expansion point.
 */
PowerEnergyRows convexify_power_energy(const DecisionStack &nominal,
                                       const SatelliteParams &p);

/// Reads the subproblem solution back into physical units.
DecisionStack extract_solution(const ConeSolution &sol,
                               const TranscriptionMap &map,
                               const ScalingMap &scaling,
                               double fixed_tf = 0.0);

}  // namespace attopt

#endif
