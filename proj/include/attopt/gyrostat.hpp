#ifndef ATTOPT_GYROSTAT_HPP
#define ATTOPT_GYROSTAT_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "attopt/quaternion.hpp"

namespace attopt {

using Vec11 = Eigen::Matrix<double, 11, 1>;
using Mat11 = Eigen::Matrix<double, 11, 11>;
using Mat11x4 = Eigen::Matrix<double, 11, 4>;
using Mat3x4 = Eigen::Matrix<double, 3, 4>;

/**
 * Physical parameters of the rotor-actuated satellite.
 * Construct through validated() which enforces:
 *  - J symmetric positive definite,
 *  - each actuator Jacobian column unit-norm (within 5e-3),
 *  - r_max, u_max, Jr > 0.
 */
struct SatelliteParams {
  Mat3 J;        // inertia, kg m^2
  Mat3 J_inv;    // cached inverse
  Mat3x4 Ar;     // rotor axes in the body frame (unit columns)
  double r_max;  // rotor momentum bound, N m s
  double u_max;  // rotor torque bound, N m
  double Jr;     // rotor inertia about its spin axis, kg m^2
  std::optional<double> P_max;  // ADCS power bound, W
  std::optional<double> E_max;  // ADCS energy bound, J

  static SatelliteParams validated(const Mat3 &J, const Mat3x4 &Ar,
                                   double r_max, double u_max, double Jr,
                                   std::optional<double> P_max = {},
                                   std::optional<double> E_max = {});

  // Representative agile imaging smallsat (four canted rotors).
  static SatelliteParams reference();

  // FNV-1a over the numeric content; identifies the atlas provenance.
  uint64_t content_hash() const;
};

/// Full gyrostat state x = [q; omega; r].
struct GyrostatState {
  UnitQuaternion q;
  BodyRate omega = BodyRate::Zero();
  Vec4 rotor_momentum = Vec4::Zero();

  Vec11 to_vector() const;
  static GyrostatState from_vector(const Vec11 &x);  // renormalizes q

  static GyrostatState rest(const UnitQuaternion &attitude) {
    GyrostatState s;
    s.q = attitude;
    return s;
  }
};

/// Rotor torque command, N m.
using ControlInput = Vec4;

/// dx/dt per the gyrostat equations of motion.
Vec11 dynamics(const GyrostatState &x, const ControlInput &u,
               const SatelliteParams &p);

/// Continuous-time Jacobians of the normalized dynamics x' = tf * f(x,u).
struct NormalizedJacobians {
  Mat11 A;       // tf * df/dx
  Mat11x4 B;     // tf * df/du
  Vec11 Sigma;   // f(x,u)
  Vec11 offset;  // e = -(A x + B u)
};

namespace detail {
// Raw 11-vector form of the dynamics. The quaternion block is treated as
// a free vector (no renormalization); the linearization and the state
// transition integrals differentiate exactly this map.
Vec11 dynamics_raw(const Vec11 &x, const ControlInput &u,
                   const SatelliteParams &p);
NormalizedJacobians jacobians_raw(const Vec11 &x, const ControlInput &u,
                                  double tf, const SatelliteParams &p);
// 4x3 matrix Xi(q) with qdot = 0.5 * Xi(q) * omega.
Eigen::Matrix<double, 4, 3> xi_matrix(const Vec4 &q);
}  // namespace detail

/// Piecewise-linear input signal over [t_front, t_back], clamped outside.
class FohSignal {
 public:
  FohSignal(std::vector<double> times, std::vector<ControlInput> values);
  ControlInput operator()(double t) const;
  static FohSignal constant(const ControlInput &u);

 private:
  std::vector<double> times_;
  std::vector<ControlInput> values_;
};

struct TrajectorySample {
  double t = 0.0;
  GyrostatState state;
  ControlInput u = ControlInput::Zero();
};

struct Trajectory {
  std::vector<TrajectorySample> samples;

  // CSV columns: t,q1..q4,wx,wy,wz,r1..r4,u1..u4,power_w,energy_j
  void write_csv(const std::string &path, const SatelliteParams &p) const;
  static Trajectory read_csv(const std::string &path);
};

/**
 * Classical fixed-step RK4 with quaternion renormalization after every
 * step. Returns steps+1 samples at uniform times. Throws std::runtime_error
 * with the offending time when a non-finite derivative appears.
 */
Trajectory rk4_integrate(const GyrostatState &x0,
                         const std::function<ControlInput(double)> &u_of_t,
                         double t0, double tf, int steps,
                         const SatelliteParams &p);

NormalizedJacobians normalized_jacobians(const GyrostatState &x,
                                         const ControlInput &u, double tf,
                                         const SatelliteParams &p);

/// Total mechanical rotor power sum_i |u_i r_i| / Jr, W.
double instantaneous_power(const GyrostatState &x, const ControlInput &u,
                           const SatelliteParams &p);

/// Trapezoidal energy of the power profile, J. Needs >= 2 samples.
double cumulative_energy(const Trajectory &traj, const SatelliteParams &p);

}  // namespace attopt

#endif
