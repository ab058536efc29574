#include "attopt/tracking.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace attopt {

ErrorState error_state(const GyrostatState &actual,
                       const GyrostatState &reference) {
  const AxisAngle aa =
      quaternion_to_axis_angle(error_quaternion(actual.q, reference.q));
  ErrorState e;
  e.phi = aa.axis * aa.angle_rad;
  e.domega = actual.omega - reference.omega;
  e.dr = actual.rotor_momentum - reference.rotor_momentum;
  return e;
}

void error_jacobians(const GyrostatState &reference,
                     const SatelliteParams &p, Mat10 &A_hat, Mat10x4 &B_hat) {
  const Vec3 &w = reference.omega;
  const Vec4 &r = reference.rotor_momentum;
  const Mat3 wx = cross_matrix(w);

  A_hat.setZero();
  A_hat.block<3, 3>(0, 0) = -wx;
  A_hat.block<3, 3>(0, 3) = Mat3::Identity();
  A_hat.block<3, 3>(3, 3) =
      -p.J_inv * (wx * p.J - cross_matrix(p.J * w + p.Ar * r));
  A_hat.block<3, 4>(3, 6) = -p.J_inv * wx * p.Ar;

  B_hat.setZero();
  B_hat.block<3, 4>(3, 0) = -p.J_inv * p.Ar;
  B_hat.block<4, 4>(6, 0) = Mat4::Identity();
}

MatX expm(const MatX &m) {
  int scale = 0;
  double nrm = m.cwiseAbs().rowwise().sum().maxCoeff();
  while (nrm > 0.5) {
    nrm *= 0.5;
    ++scale;
  }
  const MatX ms = m / std::pow(2.0, scale);
  MatX term = MatX::Identity(m.rows(), m.cols());
  MatX sum = term;
  for (int k = 1; k <= 20; ++k) {
    term = term * ms / k;
    sum += term;
    if (term.lpNorm<Eigen::Infinity>() < 1e-18) break;
  }
  for (int i = 0; i < scale; ++i) sum = sum * sum;
  return sum;
}

void discretize_zoh(const MatX &A, const MatX &B, double dt, MatX &Ad,
                    MatX &Bd) {
  if (!(dt > 0.0)) {
    throw std::invalid_argument("discretize_zoh: dt must be positive");
  }
  const auto n = A.rows();
  const auto m = B.cols();
  MatX aug = MatX::Zero(n + m, n + m);
  aug.topLeftCorner(n, n) = A * dt;
  aug.topRightCorner(n, m) = B * dt;
  const MatX e = expm(aug);
  Ad = e.topLeftCorner(n, n);
  Bd = e.topRightCorner(n, m);
}

LqrWeights LqrWeights::defaults() {
  LqrWeights w;
  w.Q.setZero();
  w.Q.diagonal().segment<3>(0).setConstant(10.0);
  w.Q.diagonal().segment<3>(3).setConstant(1.0);
  w.Q.diagonal().segment<4>(6).setConstant(0.01);
  w.R = Mat4::Identity();
  w.alpha = 100.0;
  w.Q_terminal = w.Q;
  return w;
}

std::vector<MatX> riccati_gains(const std::vector<MatX> &Ad,
                                const std::vector<MatX> &Bd, const MatX &Q,
                                const MatX &R, const MatX &Q_terminal,
                                double alpha,
                                const std::vector<int> &observation_nodes) {
  if (Ad.size() != Bd.size() || Ad.empty()) {
    throw std::invalid_argument("riccati_gains: need one (Ad, Bd) per interval");
  }
  const int intervals = static_cast<int>(Ad.size());
  std::vector<bool> observed(intervals + 1, false);
  for (int k : observation_nodes) {
    if (k >= 0 && k <= intervals) observed[static_cast<size_t>(k)] = true;
  }

  std::vector<MatX> gains(intervals);
  MatX P = Q_terminal;
  for (int k = intervals - 1; k >= 0; --k) {
    const MatX &A = Ad[k];
    const MatX &B = Bd[k];
    const MatX H = R + B.transpose() * P * B;
    Eigen::LLT<MatX> llt(H);
    if (llt.info() != Eigen::Success) {
      throw std::runtime_error(
          "riccati_gains: R + B'PB not positive definite at interval " +
          std::to_string(k));
    }
    const MatX K = llt.solve(B.transpose() * P * A);
    const MatX Qk = observed[static_cast<size_t>(k)] ? (alpha * Q).eval() : Q;
    const MatX Acl = A - B * K;
    P = K.transpose() * R * K + Acl.transpose() * P * Acl + Qk;
    P = 0.5 * (P + P.transpose()).eval();
    gains[k] = K;
  }
  return gains;
}

GainSchedule design_tracking_gains(const DecisionStack &reference,
                                   const SatelliteParams &p_nominal,
                                   const LqrWeights &w,
                                   const std::vector<int> &observation_nodes) {
  const int K = reference.num_nodes();
  if (K < 2) {
    throw std::invalid_argument("design_tracking_gains: need K >= 2");
  }
  const double dt = reference.t_f / (K - 1);

  std::vector<MatX> Ad(K - 1), Bd(K - 1);
  Mat10 A_hat;
  Mat10x4 B_hat;
  for (int k = 0; k + 1 < K; ++k) {
    error_jacobians(reference.states[k], p_nominal, A_hat, B_hat);
    discretize_zoh(A_hat, B_hat, dt, Ad[k], Bd[k]);
  }

  GainSchedule sched;
  sched.dt = dt;
  sched.gains = riccati_gains(Ad, Bd, w.Q, w.R, w.Q_terminal, w.alpha,
                              observation_nodes);
  return sched;
}

Trajectory simulate_tracking(const DecisionStack &reference,
                             const GainSchedule &gains,
                             const SatelliteParams &p_true, TrackingMode mode,
                             int substeps_per_interval) {
  const int K = reference.num_nodes();
  if (mode == TrackingMode::closed_loop &&
      gains.horizon() != K) {
    throw std::invalid_argument(
        "simulate_tracking: gain horizon does not match the reference");
  }
  const double dt = reference.t_f / (K - 1);

  std::vector<double> times(K);
  for (int k = 0; k < K; ++k) times[k] = dt * k;
  const FohSignal feedforward(times, reference.inputs);

  Trajectory traj;
  traj.samples.reserve(K);
  GyrostatState x = reference.states[0];
  traj.samples.push_back({0.0, x, reference.inputs[0]});

  for (int k = 0; k + 1 < K; ++k) {
    ControlInput du = ControlInput::Zero();
    if (mode == TrackingMode::closed_loop) {
      const Vec10 dx = error_state(x, reference.states[k]).to_vector();
      du = -gains.gains[static_cast<size_t>(k)] * dx;
    }
    auto u_cmd = [&](double t) {
      return (feedforward(t) + du)
          .cwiseMax(-p_true.u_max)
          .cwiseMin(p_true.u_max);
    };
    const Trajectory leg = rk4_integrate(x, u_cmd, times[k], times[k + 1],
                                         substeps_per_interval, p_true);
    x = leg.samples.back().state;
    traj.samples.push_back({times[k + 1], x, u_cmd(times[k + 1])});
  }
  return traj;
}

ErrorMetrics error_metrics(const std::vector<GyrostatState> &actual_at_nodes,
                           const std::vector<ReferencePoint> &points) {
  if (points.empty()) {
    throw std::invalid_argument("error_metrics: empty observation set");
  }
  ErrorMetrics m;
  const Vec4 q_identity(0.0, 0.0, 0.0, 1.0);
  for (const ReferencePoint &pt : points) {
    if (pt.node < 0 ||
        pt.node >= static_cast<int>(actual_at_nodes.size())) {
      throw std::invalid_argument("error_metrics: node outside trajectory");
    }
    const GyrostatState &x = actual_at_nodes[static_cast<size_t>(pt.node)];
    const UnitQuaternion qe =
        error_quaternion(x.q, pt.attitude).canonical_sign();
    const double eq = (qe.coeffs() - q_identity).norm();
    const double ew = (x.omega - pt.body_rate).norm();
    if (eq > m.q_e_max) {
      m.q_e_max = eq;
      m.argmax_node = pt.node;
    }
    m.w_e_max = std::max(m.w_e_max, ew);
    m.q_e_avg += eq;
    m.w_e_avg += ew;
  }
  m.q_e_avg /= static_cast<double>(points.size());
  m.w_e_avg /= static_cast<double>(points.size());
  return m;
}

std::vector<ReferencePoint> reference_points(const DecisionStack &stack) {
  std::vector<ReferencePoint> points(stack.states.size());
  for (size_t k = 0; k < stack.states.size(); ++k) {
    points[k] = {static_cast<int>(k), stack.states[k].q,
                 stack.states[k].omega};
  }
  return points;
}

std::string ErrorMetrics::to_json(const std::string &mode,
                                  const std::string &inertia_used) const {
  nlohmann::json j;
  j["q_e_max"] = q_e_max;
  j["q_e_avg"] = q_e_avg;
  j["w_e_max"] = w_e_max;
  j["w_e_avg"] = w_e_avg;
  j["mode"] = mode;
  j["inertia_used"] = inertia_used;
  return j.dump(2);
}

}  // namespace attopt
