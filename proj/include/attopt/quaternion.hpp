#ifndef ATTOPT_QUATERNION_HPP
#define ATTOPT_QUATERNION_HPP

#include <Eigen/Dense>
#include <vector>

namespace attopt {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

/// Angular velocity about the body-fixed axes [rad/s].
using BodyRate = Vec3;

/**
 * Unit quaternion, stored vector-part-first: (q1, q2, q3, q4) = (v, s).
 * Parameterizes the attitude of a body-fixed frame w.r.t. an inertial
 * frame; rotation_matrix() maps body vectors into the inertial frame.
 */
class UnitQuaternion {
 public:
  UnitQuaternion() : coeffs_(0.0, 0.0, 0.0, 1.0) {}

  // Normalizes on construction. Throws std::invalid_argument on a
  // near-zero input (norm < 1e-12).
  UnitQuaternion(double v1, double v2, double v3, double s);
  explicit UnitQuaternion(const Vec4 &vector_scalar);

  static UnitQuaternion identity() { return UnitQuaternion(); }

  const Vec4 &coeffs() const { return coeffs_; }
  Vec3 vector_part() const { return coeffs_.head<3>(); }
  double scalar_part() const { return coeffs_(3); }

  UnitQuaternion conjugate() const {
    UnitQuaternion q;
    q.coeffs_ << -coeffs_(0), -coeffs_(1), -coeffs_(2), coeffs_(3);
    return q;
  }

  double dot(const UnitQuaternion &other) const {
    return coeffs_.dot(other.coeffs_);
  }

  // Flips the sign so the scalar part is nonnegative. The rotation is
  // unchanged (double cover); error metrics rely on this canonical sign.
  UnitQuaternion canonical_sign() const;

  Mat3 rotation_matrix() const;

  double norm() const { return coeffs_.norm(); }

 private:
  Vec4 coeffs_;  // (v1, v2, v3, s)
};

/// Euler axis-angle: unit axis, angle in (-pi, pi].
struct AxisAngle {
  Vec3 axis;
  double angle_rad;
};

/// Hamilton product a*b (vector-first storage). Not commutative.
UnitQuaternion hamilton_product(const UnitQuaternion &a,
                                const UnitQuaternion &b);

/// Error quaternion q_e = q_desired^+ * q. Identity when q == q_desired.
UnitQuaternion error_quaternion(const UnitQuaternion &q,
                                const UnitQuaternion &q_desired);

/**
 * 4x4 matrix M(q_desired) with M * q.coeffs() == error_quaternion(q,
 * q_desired).coeffs(). Constant in q, so the error quaternion is an
 * affine function of q given a fixed desired attitude.
 */
Mat4 error_quaternion_matrix(const UnitQuaternion &q_desired);

/**
 * Skew operators for a body rate:
 *  - Omega4: 4x4 matrix with qdot = 0.5 * Omega4 * q
 *  - Cross3: 3x3 matrix with Cross3 * v == omega x v
 * Both are skew-symmetric.
 */
void skew_operators(const BodyRate &omega, Mat4 &omega4, Mat3 &cross3);

Mat3 cross_matrix(const Vec3 &v);

UnitQuaternion axis_angle_to_quaternion(const AxisAngle &aa);

// Near the identity (angle < 1e-12 rad) returns angle 0 about (0,0,1).
AxisAngle quaternion_to_axis_angle(const UnitQuaternion &q);

/// Rotation angle of q in [0, pi].
double rotation_angle(const UnitQuaternion &q);

/**
 * Spherical linear interpolation along the shorter arc (q1 is negated
 * when dot(q0,q1) < 0). For antipodal inputs the great circle is chosen
 * through a fixed axis orthogonal to q0, so results stay deterministic.
 */
UnitQuaternion slerp(const UnitQuaternion &q0, const UnitQuaternion &q1,
                     double t);

/**
 * n near-uniform unit vectors from the golden-spiral (Fibonacci)
 * lattice. Deterministic for fixed n.
 */
std::vector<Vec3> equidistributed_axes(int n);

/// Inverse of UnitQuaternion::rotation_matrix (Shepperd's method).
UnitQuaternion quaternion_from_rotation_matrix(const Mat3 &R);

}  // namespace attopt

#endif
