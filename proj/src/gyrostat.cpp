#include "attopt/gyrostat.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace attopt {

SatelliteParams SatelliteParams::validated(const Mat3 &J, const Mat3x4 &Ar,
                                           double r_max, double u_max,
                                           double Jr,
                                           std::optional<double> P_max,
                                           std::optional<double> E_max) {
  if ((J - J.transpose()).lpNorm<Eigen::Infinity>() > 1e-9) {
    throw std::invalid_argument("SatelliteParams: J must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Mat3> es(J);
  if (es.eigenvalues().minCoeff() <= 0.0) {
    throw std::invalid_argument("SatelliteParams: J must be positive definite");
  }
  for (int i = 0; i < 4; ++i) {
    // 5e-3 admits published rotor configurations rounded to two decimals.
    if (std::abs(Ar.col(i).norm() - 1.0) > 5e-3) {
      throw std::invalid_argument(
          "SatelliteParams: actuator Jacobian columns must be unit-norm");
    }
  }
  if (r_max <= 0.0 || u_max <= 0.0 || Jr <= 0.0) {
    throw std::invalid_argument(
        "SatelliteParams: r_max, u_max, Jr must be positive");
  }
  SatelliteParams p;
  p.J = J;
  p.J_inv = J.inverse();
  p.Ar = Ar;
  p.r_max = r_max;
  p.u_max = u_max;
  p.Jr = Jr;
  p.P_max = P_max;
  p.E_max = E_max;
  return p;
}

SatelliteParams SatelliteParams::reference() {
  Mat3 J;
  J << 8.5, 0.0, 0.0,  //
      0.0, 8.5, 0.0,   //
      0.0, 0.0, 6.0;
  Mat3x4 Ar;
  Ar << -0.68, 0.68, 0.68, -0.68,  //
      -0.68, -0.68, 0.68, 0.68,    //
      0.26, 0.26, 0.26, 0.26;
  return validated(J, Ar, 0.80, 0.06, 0.0096);
}

uint64_t SatelliteParams::content_hash() const {
  std::vector<double> data;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) data.push_back(J(r, c));
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 4; ++c) data.push_back(Ar(r, c));
  data.push_back(r_max);
  data.push_back(u_max);
  data.push_back(Jr);
  data.push_back(P_max.value_or(-1.0));
  data.push_back(E_max.value_or(-1.0));

  uint64_t h = 14695981039346656037ull;
  const auto *bytes = reinterpret_cast<const unsigned char *>(data.data());
  for (size_t i = 0; i < data.size() * sizeof(double); ++i) {
    h ^= bytes[i];
    h *= 1099511628211ull;
  }
  return h;
}

Vec11 GyrostatState::to_vector() const {
  Vec11 x;
  x.segment<4>(0) = q.coeffs();
  x.segment<3>(4) = omega;
  x.segment<4>(7) = rotor_momentum;
  return x;
}

GyrostatState GyrostatState::from_vector(const Vec11 &x) {
  GyrostatState s;
  s.q = UnitQuaternion(Vec4(x.segment<4>(0)));
  s.omega = x.segment<3>(4);
  s.rotor_momentum = x.segment<4>(7);
  return s;
}

namespace detail {

Vec11 dynamics_raw(const Vec11 &x, const ControlInput &u,
                   const SatelliteParams &p) {
  const Vec4 q = x.segment<4>(0);
  const Vec3 omega = x.segment<3>(4);
  const Vec4 r = x.segment<4>(7);

  Mat4 omega4;
  Mat3 cross3;
  skew_operators(omega, omega4, cross3);

  Vec11 dx;
  dx.segment<4>(0) = 0.5 * omega4 * q;
  dx.segment<3>(4) = -p.J_inv * (cross3 * (p.J * omega + p.Ar * r) + p.Ar * u);
  dx.segment<4>(7) = u;
  return dx;
}

// 4x3 matrix Xi(q) with qdot = 0.5 * Xi(q) * omega.
Eigen::Matrix<double, 4, 3> xi_matrix(const Vec4 &q) {
  Eigen::Matrix<double, 4, 3> xi;
  xi << q(3), -q(2), q(1),  //
      q(2), q(3), -q(0),    //
      -q(1), q(0), q(3),    //
      -q(0), -q(1), -q(2);
  return xi;
}

}  // namespace detail

Vec11 dynamics(const GyrostatState &x, const ControlInput &u,
               const SatelliteParams &p) {
  return detail::dynamics_raw(x.to_vector(), u, p);
}

FohSignal::FohSignal(std::vector<double> times,
                     std::vector<ControlInput> values)
    : times_(std::move(times)), values_(std::move(values)) {
  if (times_.size() != values_.size() || times_.empty()) {
    throw std::invalid_argument("FohSignal: times/values size mismatch");
  }
}

FohSignal FohSignal::constant(const ControlInput &u) {
  return FohSignal({0.0}, {u});
}

ControlInput FohSignal::operator()(double t) const {
  if (t <= times_.front()) return values_.front();
  if (t >= times_.back()) return values_.back();
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  const size_t hi = static_cast<size_t>(it - times_.begin());
  const size_t lo = hi - 1;
  const double span = times_[hi] - times_[lo];
  const double w = span > 0.0 ? (t - times_[lo]) / span : 0.0;
  return (1.0 - w) * values_[lo] + w * values_[hi];
}

Trajectory rk4_integrate(const GyrostatState &x0,
                         const std::function<ControlInput(double)> &u_of_t,
                         double t0, double tf, int steps,
                         const SatelliteParams &p) {
  if (steps < 1 || !(tf > t0)) {
    throw std::invalid_argument("rk4_integrate: need steps >= 1 and tf > t0");
  }
  const double h = (tf - t0) / steps;

  Trajectory traj;
  traj.samples.reserve(static_cast<size_t>(steps) + 1);

  Vec11 x = x0.to_vector();
  traj.samples.push_back({t0, GyrostatState::from_vector(x), u_of_t(t0)});

  for (int i = 0; i < steps; ++i) {
    const double t = t0 + i * h;
    const Vec11 k1 = detail::dynamics_raw(x, u_of_t(t), p);
    const Vec11 k2 =
        detail::dynamics_raw(x + 0.5 * h * k1, u_of_t(t + 0.5 * h), p);
    const Vec11 k3 =
        detail::dynamics_raw(x + 0.5 * h * k2, u_of_t(t + 0.5 * h), p);
    const Vec11 k4 = detail::dynamics_raw(x + h * k3, u_of_t(t + h), p);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    if (!x.allFinite()) {
      throw std::runtime_error("rk4_integrate: non-finite state at t = " +
                               std::to_string(t + h));
    }
    x.segment<4>(0).normalize();  // quaternion drift control

    const double tn = t0 + (i + 1) * h;
    traj.samples.push_back({tn, GyrostatState::from_vector(x), u_of_t(tn)});
  }
  return traj;
}

namespace detail {

NormalizedJacobians jacobians_raw(const Vec11 &xv, const ControlInput &u,
                                  double tf, const SatelliteParams &p) {
  const Vec4 q = xv.segment<4>(0);
  const Vec3 omega = xv.segment<3>(4);
  const Vec4 r = xv.segment<4>(7);

  Mat4 omega4;
  Mat3 cross3;
  skew_operators(omega, omega4, cross3);

  Mat11 A = Mat11::Zero();
  A.block<4, 4>(0, 0) = 0.5 * omega4;
  A.block<4, 3>(0, 4) = 0.5 * detail::xi_matrix(q);
  A.block<3, 3>(4, 4) =
      -p.J_inv * (cross3 * p.J - cross_matrix(p.J * omega + p.Ar * r));
  A.block<3, 4>(4, 7) = -p.J_inv * cross3 * p.Ar;
  A *= tf;

  Mat11x4 B = Mat11x4::Zero();
  B.block<3, 4>(4, 0) = -p.J_inv * p.Ar;
  B.block<4, 4>(7, 0) = Mat4::Identity();
  B *= tf;

  NormalizedJacobians out;
  out.A = A;
  out.B = B;
  out.Sigma = dynamics_raw(xv, u, p);
  out.offset = -(A * xv + B * u);
  return out;
}

}  // namespace detail

NormalizedJacobians normalized_jacobians(const GyrostatState &x,
                                         const ControlInput &u, double tf,
                                         const SatelliteParams &p) {
  if (!(tf > 0.0)) {
    throw std::invalid_argument("normalized_jacobians: tf must be positive");
  }
  return detail::jacobians_raw(x.to_vector(), u, tf, p);
}

double instantaneous_power(const GyrostatState &x, const ControlInput &u,
                           const SatelliteParams &p) {
  return (u.cwiseProduct(x.rotor_momentum) / p.Jr).cwiseAbs().sum();
}

double cumulative_energy(const Trajectory &traj, const SatelliteParams &p) {
  if (traj.samples.size() < 2) {
    throw std::invalid_argument("cumulative_energy: need >= 2 samples");
  }
  double energy = 0.0;
  for (size_t i = 1; i < traj.samples.size(); ++i) {
    const auto &a = traj.samples[i - 1];
    const auto &b = traj.samples[i];
    const double pa = instantaneous_power(a.state, a.u, p);
    const double pb = instantaneous_power(b.state, b.u, p);
    energy += 0.5 * (pa + pb) * (b.t - a.t);
  }
  return energy;
}

void Trajectory::write_csv(const std::string &path,
                           const SatelliteParams &p) const {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("Trajectory::write_csv: cannot open " + path);
  }
  out << "t,q1,q2,q3,q4,wx,wy,wz,r1,r2,r3,r4,u1,u2,u3,u4,power_w,energy_j\n";
  char buf[64];
  auto put = [&](double v, char sep) {
    std::snprintf(buf, sizeof(buf), "%.17g%c", v, sep);
    out << buf;
  };
  double energy = 0.0;
  for (size_t i = 0; i < samples.size(); ++i) {
    const auto &s = samples[i];
    if (i > 0) {
      const auto &prev = samples[i - 1];
      energy += 0.5 *
                (instantaneous_power(prev.state, prev.u, p) +
                 instantaneous_power(s.state, s.u, p)) *
                (s.t - prev.t);
    }
    put(s.t, ',');
    for (int k = 0; k < 4; ++k) put(s.state.q.coeffs()(k), ',');
    for (int k = 0; k < 3; ++k) put(s.state.omega(k), ',');
    for (int k = 0; k < 4; ++k) put(s.state.rotor_momentum(k), ',');
    for (int k = 0; k < 4; ++k) put(s.u(k), ',');
    put(instantaneous_power(s.state, s.u, p), ',');
    put(energy, '\n');
  }
}

Trajectory Trajectory::read_csv(const std::string &path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("Trajectory::read_csv: cannot open " + path);
  }
  Trajectory traj;
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("Trajectory::read_csv: empty file " + path);
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::vector<double> vals;
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      vals.push_back(std::stod(cell));
    }
    if (vals.size() < 16) {
      throw std::runtime_error("Trajectory::read_csv: short row in " + path);
    }
    TrajectorySample s;
    s.t = vals[0];
    Vec11 x;
    for (int k = 0; k < 11; ++k) x(k) = vals[1 + k];
    s.state = GyrostatState::from_vector(x);
    for (int k = 0; k < 4; ++k) s.u(k) = vals[12 + k];
    traj.samples.push_back(s);
  }
  return traj;
}

}  // namespace attopt
