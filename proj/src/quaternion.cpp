#include "attopt/quaternion.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace attopt {

namespace {
constexpr double kZeroNormTol = 1e-12;
constexpr double kIdentityAngleTol = 1e-12;
constexpr double kAntipodalTol = 1e-9;
}  // namespace

UnitQuaternion::UnitQuaternion(double v1, double v2, double v3, double s)
    : UnitQuaternion(Vec4(v1, v2, v3, s)) {}

UnitQuaternion::UnitQuaternion(const Vec4 &vector_scalar) {
  const double n = vector_scalar.norm();
  if (n < kZeroNormTol) {
    throw std::invalid_argument("UnitQuaternion: near-zero norm");
  }
  coeffs_ = vector_scalar / n;
}

UnitQuaternion UnitQuaternion::canonical_sign() const {
  UnitQuaternion q = *this;
  if (q.coeffs_(3) < 0.0) {
    q.coeffs_ = -q.coeffs_;
  }
  return q;
}

Mat3 UnitQuaternion::rotation_matrix() const {
  const Vec3 v = vector_part();
  const double s = scalar_part();
  const Mat3 vx = cross_matrix(v);
  return Mat3::Identity() + 2.0 * s * vx + 2.0 * vx * vx;
}

UnitQuaternion hamilton_product(const UnitQuaternion &a,
                                const UnitQuaternion &b) {
  const Vec3 av = a.vector_part();
  const Vec3 bv = b.vector_part();
  const double as = a.scalar_part();
  const double bs = b.scalar_part();
  Vec4 out;
  out.head<3>() = as * bv + bs * av + av.cross(bv);
  out(3) = as * bs - av.dot(bv);
  return UnitQuaternion(out);  // renormalizes
}

UnitQuaternion error_quaternion(const UnitQuaternion &q,
                                const UnitQuaternion &q_desired) {
  return hamilton_product(q_desired.conjugate(), q);
}

Mat4 error_quaternion_matrix(const UnitQuaternion &q_desired) {
  const Vec4 &d = q_desired.coeffs();
  Mat4 m;
  m << d(3), d(2), -d(1), -d(0),   //
      -d(2), d(3), d(0), -d(1),    //
      d(1), -d(0), d(3), -d(2),    //
      d(0), d(1), d(2), d(3);
  return m;
}

Mat3 cross_matrix(const Vec3 &v) {
  Mat3 m;
  m << 0.0, -v(2), v(1),  //
      v(2), 0.0, -v(0),   //
      -v(1), v(0), 0.0;
  return m;
}

void skew_operators(const BodyRate &omega, Mat4 &omega4, Mat3 &cross3) {
  const double wx = omega(0), wy = omega(1), wz = omega(2);
  omega4 << 0.0, wz, -wy, wx,  //
      -wz, 0.0, wx, wy,        //
      wy, -wx, 0.0, wz,        //
      -wx, -wy, -wz, 0.0;
  cross3 = cross_matrix(omega);
}

UnitQuaternion axis_angle_to_quaternion(const AxisAngle &aa) {
  const double half = 0.5 * aa.angle_rad;
  Vec4 c;
  c.head<3>() = std::sin(half) * aa.axis.normalized();
  c(3) = std::cos(half);
  return UnitQuaternion(c);
}

AxisAngle quaternion_to_axis_angle(const UnitQuaternion &q_in) {
  const UnitQuaternion q = q_in.canonical_sign();
  const double vnorm = q.vector_part().norm();
  const double angle = 2.0 * std::atan2(vnorm, q.scalar_part());
  if (angle < kIdentityAngleTol) {
    return AxisAngle{Vec3(0.0, 0.0, 1.0), 0.0};
  }
  return AxisAngle{q.vector_part() / vnorm, angle};
}

double rotation_angle(const UnitQuaternion &q) {
  return quaternion_to_axis_angle(q).angle_rad;
}

UnitQuaternion slerp(const UnitQuaternion &q0, const UnitQuaternion &q1,
                     double t) {
  Vec4 a = q0.coeffs();
  Vec4 b = q1.coeffs();
  double d = a.dot(b);
  if (d < 0.0) {  // shorter arc
    b = -b;
    d = -d;
  }
  d = std::min(d, 1.0);

  if (d > 1.0 - kAntipodalTol) {
    // Nearly identical: linear blend is accurate and avoids 0/0.
    return UnitQuaternion(Vec4((1.0 - t) * a + t * b));
  }

  double theta = std::acos(d);
  Vec4 ortho = (b - d * a);
  double on = ortho.norm();
  if (on < kAntipodalTol || std::numbers::pi - theta < kAntipodalTol) {
    // Antipodal endpoints: every great circle is a geodesic. Pick the
    // one through a fixed perpendicular direction for determinism.
    Vec4 pick(1.0, 0.0, 0.0, 0.0);
    ortho = pick - pick.dot(a) * a;
    if (ortho.norm() < kAntipodalTol) {
      pick << 0.0, 1.0, 0.0, 0.0;
      ortho = pick - pick.dot(a) * a;
    }
    on = ortho.norm();
    theta = std::numbers::pi;
  }
  ortho /= on;
  return UnitQuaternion(
      Vec4(std::cos(t * theta) * a + std::sin(t * theta) * ortho));
}

UnitQuaternion quaternion_from_rotation_matrix(const Mat3 &R) {
  // Shepperd: branch on the largest of the four squared components.
  const double tr = R.trace();
  Vec4 q;
  if (tr >= R(0, 0) && tr >= R(1, 1) && tr >= R(2, 2)) {
    const double s = std::sqrt(1.0 + tr) * 2.0;
    q << (R(2, 1) - R(1, 2)) / s, (R(0, 2) - R(2, 0)) / s,
        (R(1, 0) - R(0, 1)) / s, 0.25 * s;
  } else if (R(0, 0) >= R(1, 1) && R(0, 0) >= R(2, 2)) {
    const double s = std::sqrt(1.0 + R(0, 0) - R(1, 1) - R(2, 2)) * 2.0;
    q << 0.25 * s, (R(0, 1) + R(1, 0)) / s, (R(0, 2) + R(2, 0)) / s,
        (R(2, 1) - R(1, 2)) / s;
  } else if (R(1, 1) >= R(2, 2)) {
    const double s = std::sqrt(1.0 + R(1, 1) - R(0, 0) - R(2, 2)) * 2.0;
    q << (R(0, 1) + R(1, 0)) / s, 0.25 * s, (R(1, 2) + R(2, 1)) / s,
        (R(0, 2) - R(2, 0)) / s;
  } else {
    const double s = std::sqrt(1.0 + R(2, 2) - R(0, 0) - R(1, 1)) * 2.0;
    q << (R(0, 2) + R(2, 0)) / s, (R(1, 2) + R(2, 1)) / s, 0.25 * s,
        (R(1, 0) - R(0, 1)) / s;
  }
  return UnitQuaternion(q);
}

std::vector<Vec3> equidistributed_axes(int n) {
  if (n < 1) {
    throw std::invalid_argument("equidistributed_axes: n must be >= 1");
  }
  // Golden-spiral lattice.
  const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
  std::vector<Vec3> axes;
  axes.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - 2.0 * (i + 0.5) / n;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden_angle * i;
    axes.emplace_back(r * std::cos(phi), r * std::sin(phi), z);
  }
  return axes;
}

}  // namespace attopt
