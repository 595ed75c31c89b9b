#pragma once

// Rotation algebra shared by every module.
//
// Conventions (project-wide):
//   * quaternions are scalar-first and compose with the Hamilton product;
//   * a quaternion q stands for R_BI, the rotation taking body-frame
//     coordinates to inertial coordinates: rotate(q, u_B) == u_I;
//   * a matrix R_XY takes X-frame coordinates to Y-frame coordinates, so
//     R_IH = h_frame(v, s) maps inertial vectors into the H frame.

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "lcinv/errors.hpp"

namespace lcinv {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;

constexpr double kPi = 3.14159265358979323846;
constexpr double kDeg = kPi / 180.0;
constexpr double kRpm = 2.0 * kPi / 60.0;

class UnitQuaternion {
public:
    UnitQuaternion() = default;
    /// Normalizes the input; throws ArgumentError for a (near) zero quaternion.
    UnitQuaternion(double w, double x, double y, double z);
    static UnitQuaternion identity() { return {}; }
    static UnitQuaternion from_coeffs(const Vec4& c) { return {c[0], c[1], c[2], c[3]}; }

    double w() const { return w_; }
    double x() const { return x_; }
    double y() const { return y_; }
    double z() const { return z_; }
    Vec3 vec() const { return {x_, y_, z_}; }
    Vec4 coeffs() const { return {w_, x_, y_, z_}; }

    UnitQuaternion conjugate() const;
    UnitQuaternion operator-() const;
    double dot(const UnitQuaternion& o) const;

private:
    double w_ = 1.0, x_ = 0.0, y_ = 0.0, z_ = 0.0;
};

UnitQuaternion quat_multiply(const UnitQuaternion& a, const UnitQuaternion& b);
inline UnitQuaternion operator*(const UnitQuaternion& a, const UnitQuaternion& b) {
    return quat_multiply(a, b);
}

// Raw Hamilton algebra on 4-vectors [w, x, y, z], no normalization.
Vec4 hamilton(const Vec4& a, const Vec4& b);
Vec4 quat_conj(const Vec4& q);
/// Matrix L(a) with hamilton(a, b) == L(a) * b.
Eigen::Matrix4d left_mult_matrix(const Vec4& a);
/// Matrix R(b) with hamilton(a, b) == R(b) * a.
Eigen::Matrix4d right_mult_matrix(const Vec4& b);

Mat3 to_matrix(const UnitQuaternion& q);
/// Proper rotation matrix to quaternion (Shepperd's method, w >= 0).
UnitQuaternion from_matrix(const Mat3& r);
Vec3 rotate(const UnitQuaternion& q, const Vec3& u);

UnitQuaternion from_axis_angle(const Vec3& axis, double angle);
/// Exponential map: rotation vector (axis * angle) to quaternion.
UnitQuaternion from_rotation_vector(const Vec3& phi);
/// Logarithm map, shortest representative (angle in [0, pi]).
Vec3 to_rotation_vector(const UnitQuaternion& q);
/// Rotation angle in [0, pi] of the rotation represented by q.
double rotation_angle(const UnitQuaternion& q);
/// Geodesic distance between the rotations of a and b, sign-insensitive.
double angular_distance(const UnitQuaternion& a, const UnitQuaternion& b);

Mat3 skew(const Vec3& v);
/// Axial vector of the skew-symmetric part of m.
Vec3 vee(const Mat3& m);
/// Left Jacobian of SO(3) at rotation vector phi.
Mat3 so3_left_jacobian(const Vec3& phi);

enum class Frame { BI, IB, HI, BH };
const char* frame_name(Frame f);

struct AngularVelocity {
    Vec3 value = Vec3::Zero();  // rad/s
    Frame frame = Frame::BI;
};

/// Forward-difference angular velocity: vector part of (2/dt)(q_next q_i^c - 1).
AngularVelocity omega_from_quat_pair(const UnitQuaternion& q_i, const UnitQuaternion& q_next, double dt);

double phase_angle(const Vec3& v_I, const Vec3& s_I);

/// R_IH for the observation geometry: rows are h = (s+v)/|s+v|, i = j x h,
/// j = (s x v)/|s x v|. Throws DegenerateGeometryError when |v.s| >= 1 - 1e-9.
Mat3 h_frame(const Vec3& v_I, const Vec3& s_I);

/// Rotations needed to move an angular velocity between frame tags.
struct FrameContext {
    std::optional<Mat3> r_bi;                 // body -> inertial
    std::optional<Mat3> r_ih;                 // inertial -> H
    std::optional<AngularVelocity> omega_hi;  // H frame rate, inertial coordinates
};

/// Supports BI <-> IB (needs r_bi) and BI <-> BH (needs r_ih and omega_hi).
AngularVelocity omega_convert(const AngularVelocity& w, Frame to, const FrameContext& ctx);

/// Observation geometry as a function of time: (v_I(t), s_I(t)).
using GeometryFn = std::function<std::pair<Vec3, Vec3>(double)>;

/// Angular velocity of the H frame w.r.t. inertial, in inertial coordinates,
/// from [w x] = dR_HI/dt R_HI^T with a central difference of half-width dt/2.
AngularVelocity omega_hi(const GeometryFn& geometry, double t, double dt);

/// W = dR/dt R^T estimated from two samples of R_HI separated by dt.
Mat3 rate_matrix(const Mat3& r_hi_prev, const Mat3& r_hi_next, double dt);

/// Quasi-uniform deterministic cover of SO(3) by repulsion-energy descent.
std::vector<UnitQuaternion> uniform_quaternion_sample(int count, std::uint64_t seed);

class AttitudeHistory {
public:
    /// Requires equal lengths >= 2 and strictly increasing times.
    /// Flips quaternion signs so consecutive samples have non-negative dot.
    AttitudeHistory(std::vector<double> times, std::vector<UnitQuaternion> quats);

    std::span<const double> times() const { return times_; }
    std::span<const UnitQuaternion> quats() const { return quats_; }
    std::size_t size() const { return quats_.size(); }
    const UnitQuaternion& operator[](std::size_t i) const { return quats_[i]; }

private:
    std::vector<double> times_;
    std::vector<UnitQuaternion> quats_;
};

}  // namespace lcinv
