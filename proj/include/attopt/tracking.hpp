#ifndef ATTOPT_TRACKING_HPP
#define ATTOPT_TRACKING_HPP

#include <string>
#include <vector>

#include "attopt/transcription.hpp"

namespace attopt {

using Vec10 = Eigen::Matrix<double, 10, 1>;
using Mat10 = Eigen::Matrix<double, 10, 10>;
using Mat10x4 = Eigen::Matrix<double, 10, 4>;
using MatX = Eigen::MatrixXd;

/**
 * Error state about a reference trajectory: axis-angle attitude error,
 * body-rate error, rotor-momentum error. Valid for ||phi|| < pi.
 */
struct ErrorState {
  Vec3 phi = Vec3::Zero();     // rad
  Vec3 domega = Vec3::Zero();  // rad/s
  Vec4 dr = Vec4::Zero();      // N m s

  Vec10 to_vector() const {
    Vec10 v;
    v << phi, domega, dr;
    return v;
  }
};

/// Error state of a simulated state against a reference node; the error
/// quaternion is converted to its Euler axis-angle vector.
ErrorState error_state(const GyrostatState &actual,
                       const GyrostatState &reference);

/**
 * Continuous-time Jacobians of the error dynamics about a reference
 * node. B is constant across nodes.
 */
void error_jacobians(const GyrostatState &reference,
                     const SatelliteParams &p, Mat10 &A_hat, Mat10x4 &B_hat);

/// Matrix-exponential zero-order-hold discretization (any dimensions).
void discretize_zoh(const MatX &A, const MatX &B, double dt, MatX &Ad,
                    MatX &Bd);

/// Scaling-and-squaring series matrix exponential.
MatX expm(const MatX &m);

struct LqrWeights {
  Mat10 Q;
  Mat4 R;
  double alpha = 100.0;  // extra state weight at observation nodes, > 1
  Mat10 Q_terminal;

  // attitude-dominant weighting: 10 on the axis-angle error, 1 on the
  // rate error, 0.01 on the momentum error
  static LqrWeights defaults();
};

struct GainSchedule {
  std::vector<MatX> gains;  // K-1 entries
  double dt = 0.0;

  int horizon() const { return static_cast<int>(gains.size()) + 1; }
};

/**
 * Finite-horizon discrete Riccati recursion from P_K = Q_K with
 * Q_k = alpha Q at observation nodes. Matrices P_k are symmetrized every
 * step; a non-positive-definite (R + B' P B) raises std::runtime_error.
 */
std::vector<MatX> riccati_gains(const std::vector<MatX> &Ad,
                                const std::vector<MatX> &Bd, const MatX &Q,
                                const MatX &R, const MatX &Q_terminal,
                                double alpha,
                                const std::vector<int> &observation_nodes);

/// ZOH-discretizes the error dynamics along the reference and runs the
/// Riccati recursion with the given weights.
GainSchedule design_tracking_gains(const DecisionStack &reference,
                                   const SatelliteParams &p_nominal,
                                   const LqrWeights &w,
                                   const std::vector<int> &observation_nodes);

enum class TrackingMode { open_loop, closed_loop };

/**
 * Integrates the true nonlinear dynamics (p_true may differ from the
 * design parameters) under the reference FOH torque plus, in closed
 * loop, the sampled state feedback. Commands are clamped to +-u_max.
 */
Trajectory simulate_tracking(const DecisionStack &reference,
                             const GainSchedule &gains,
                             const SatelliteParams &p_true, TrackingMode mode,
                             int substeps_per_interval = 10);

struct ReferencePoint {
  int node = 0;
  UnitQuaternion attitude;
  Vec3 body_rate = Vec3::Zero();
};

struct ErrorMetrics {
  double q_e_max = 0.0;
  double q_e_avg = 0.0;
  double w_e_max = 0.0;
  double w_e_avg = 0.0;
  int argmax_node = 0;  // node of the largest attitude error

  std::string to_json(const std::string &mode,
                      const std::string &inertia_used) const;
};

/// Point-wise quaternion/rate errors over the observation set.
ErrorMetrics error_metrics(const std::vector<GyrostatState> &actual_at_nodes,
                           const std::vector<ReferencePoint> &points);

/// Reference points over every node of a stack (for tracking audits).
std::vector<ReferencePoint> reference_points(const DecisionStack &stack);

}  // namespace attopt

#endif
