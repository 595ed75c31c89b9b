#include "lcinv/core_math.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace lcinv {

UnitQuaternion::UnitQuaternion(double w, double x, double y, double z) {
    const double n = std::sqrt(w * w + x * x + y * y + z * z);
    if (!(n > 1e-300) || !std::isfinite(n)) {
        throw ArgumentError("UnitQuaternion: cannot normalize a zero or non-finite quaternion");
    }
    w_ = w / n;
    x_ = x / n;
    y_ = y / n;
    z_ = z / n;
}

UnitQuaternion UnitQuaternion::conjugate() const {
    UnitQuaternion q = *this;
    q.x_ = -x_;
    q.y_ = -y_;
    q.z_ = -z_;
    return q;
}

UnitQuaternion UnitQuaternion::operator-() const {
    UnitQuaternion q;
    q.w_ = -w_;
    q.x_ = -x_;
    q.y_ = -y_;
    q.z_ = -z_;
    return q;
}

double UnitQuaternion::dot(const UnitQuaternion& o) const {
    return w_ * o.w_ + x_ * o.x_ + y_ * o.y_ + z_ * o.z_;
}

Vec4 hamilton(const Vec4& a, const Vec4& b) {
    return {a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
            a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
            a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
            a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0]};
}

Vec4 quat_conj(const Vec4& q) { return {q[0], -q[1], -q[2], -q[3]}; }

Eigen::Matrix4d left_mult_matrix(const Vec4& a) {
    Eigen::Matrix4d m;
    m << a[0], -a[1], -a[2], -a[3],
         a[1],  a[0], -a[3],  a[2],
         a[2],  a[3],  a[0], -a[1],
         a[3], -a[2],  a[1],  a[0];
    return m;
}

Eigen::Matrix4d right_mult_matrix(const Vec4& b) {
    Eigen::Matrix4d m;
    m << b[0], -b[1], -b[2], -b[3],
         b[1],  b[0],  b[3], -b[2],
         b[2], -b[3],  b[0],  b[1],
         b[3],  b[2], -b[1],  b[0];
    return m;
}

UnitQuaternion quat_multiply(const UnitQuaternion& a, const UnitQuaternion& b) {
    return UnitQuaternion::from_coeffs(hamilton(a.coeffs(), b.coeffs()));
}

Mat3 to_matrix(const UnitQuaternion& q) {
    const double w = q.w(), x = q.x(), y = q.y(), z = q.z();
    Mat3 r;
    r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
         2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
         2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
    return r;
}

UnitQuaternion from_matrix(const Mat3& r) {
    const double tr = r.trace();
    double w, x, y, z;
    if (tr > 0) {
        const double s = 2.0 * std::sqrt(1.0 + tr);
        w = 0.25 * s;
        x = (r(2, 1) - r(1, 2)) / s;
        y = (r(0, 2) - r(2, 0)) / s;
        z = (r(1, 0) - r(0, 1)) / s;
    } else if (r(0, 0) > r(1, 1) && r(0, 0) > r(2, 2)) {
        const double s = 2.0 * std::sqrt(1.0 + r(0, 0) - r(1, 1) - r(2, 2));
        w = (r(2, 1) - r(1, 2)) / s;
        x = 0.25 * s;
        y = (r(0, 1) + r(1, 0)) / s;
        z = (r(0, 2) + r(2, 0)) / s;
    } else if (r(1, 1) > r(2, 2)) {
        const double s = 2.0 * std::sqrt(1.0 + r(1, 1) - r(0, 0) - r(2, 2));
        w = (r(0, 2) - r(2, 0)) / s;
        x = (r(0, 1) + r(1, 0)) / s;
        y = 0.25 * s;
        z = (r(1, 2) + r(2, 1)) / s;
    } else {
        const double s = 2.0 * std::sqrt(1.0 + r(2, 2) - r(0, 0) - r(1, 1));
        w = (r(1, 0) - r(0, 1)) / s;
        x = (r(0, 2) + r(2, 0)) / s;
        y = (r(1, 2) + r(2, 1)) / s;
        z = 0.25 * s;
    }
    if (w < 0) return {-w, -x, -y, -z};
    return {w, x, y, z};
}

Vec3 rotate(const UnitQuaternion& q, const Vec3& u) {
    // v' = u + 2w (r x u) + 2 r x (r x u)
    const Vec3 r = q.vec();
    const Vec3 t = 2.0 * r.cross(u);
    return u + q.w() * t + r.cross(t);
}

UnitQuaternion from_axis_angle(const Vec3& axis, double angle) {
    const double n = axis.norm();
    if (n < 1e-300) throw ArgumentError("from_axis_angle: zero axis");
    const Vec3 a = axis / n;
    const double s = std::sin(0.5 * angle);
    return {std::cos(0.5 * angle), s * a.x(), s * a.y(), s * a.z()};
}

UnitQuaternion from_rotation_vector(const Vec3& phi) {
    const double angle = phi.norm();
    if (angle < 1e-12) {
        // second-order expansion keeps the map smooth through zero
        return {1.0 - angle * angle / 8.0, 0.5 * phi.x(), 0.5 * phi.y(), 0.5 * phi.z()};
    }
    return from_axis_angle(phi, angle);
}

Vec3 to_rotation_vector(const UnitQuaternion& q) {
    UnitQuaternion p = q.w() < 0 ? -q : q;
    const Vec3 v = p.vec();
    const double s = v.norm();
    if (s < 1e-12) return 2.0 * v;
    const double angle = 2.0 * std::atan2(s, p.w());
    return v * (angle / s);
}

double rotation_angle(const UnitQuaternion& q) {
    return 2.0 * std::atan2(q.vec().norm(), std::abs(q.w()));
}

double angular_distance(const UnitQuaternion& a, const UnitQuaternion& b) {
    return rotation_angle(quat_multiply(a, b.conjugate()));
}

Mat3 skew(const Vec3& v) {
    Mat3 m;
    m << 0, -v.z(), v.y(),
         v.z(), 0, -v.x(),
         -v.y(), v.x(), 0;
    return m;
}

Vec3 vee(const Mat3& m) {
    return 0.5 * Vec3(m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1));
}

Mat3 so3_left_jacobian(const Vec3& phi) {
    const double a = phi.norm();
    const Mat3 k = skew(phi);
    if (a < 1e-6) return Mat3::Identity() + 0.5 * k + k * k / 6.0;
    const double a2 = a * a;
    return Mat3::Identity() + (1.0 - std::cos(a)) / a2 * k + (a - std::sin(a)) / (a2 * a) * k * k;
}

const char* frame_name(Frame f) {
    switch (f) {
        case Frame::BI: return "BI";
        case Frame::IB: return "IB";
        case Frame::HI: return "HI";
        case Frame::BH: return "BH";
    }
    return "?";
}

AngularVelocity omega_from_quat_pair(const UnitQuaternion& q_i, const UnitQuaternion& q_next, double dt) {
    if (!(dt > 0)) throw ArgumentError("omega_from_quat_pair: dt must be positive");
    const Vec4 d = hamilton(q_next.coeffs(), quat_conj(q_i.coeffs()));
    // The scalar part of (2/dt)(d - 1) is generally nonzero; only the vector part is kept.
    return {(2.0 / dt) * d.tail<3>(), Frame::BI};
}

double phase_angle(const Vec3& v_I, const Vec3& s_I) {
    return std::acos(std::clamp(v_I.normalized().dot(s_I.normalized()), -1.0, 1.0));
}

Mat3 h_frame(const Vec3& v_I, const Vec3& s_I) {
    const Vec3 v = v_I.normalized();
    const Vec3 s = s_I.normalized();
    if (std::abs(v.dot(s)) >= 1.0 - 1e-9) {
        throw DegenerateGeometryError("h_frame: view and sun directions are (anti)parallel");
    }
    const Vec3 h = (s + v).normalized();
    const Vec3 j = s.cross(v).normalized();
    const Vec3 i = j.cross(h);
    Mat3 r;
    r.row(0) = h.transpose();
    r.row(1) = i.transpose();
    r.row(2) = j.transpose();
    return r;
}

AngularVelocity omega_convert(const AngularVelocity& w, Frame to, const FrameContext& ctx) {
    if (w.frame == to) return w;
    auto need = [](bool ok, const char* what) {
        if (!ok) throw ArgumentError(std::string("omega_convert: missing ") + what);
    };
    // Route everything through BI.
    Vec3 bi;
    switch (w.frame) {
        case Frame::BI:
            bi = w.value;
            break;
        case Frame::IB:
            need(ctx.r_bi.has_value(), "r_bi");
            bi = -(*ctx.r_bi) * w.value;
            break;
        case Frame::BH:
            need(ctx.r_ih.has_value(), "r_ih");
            need(ctx.omega_hi.has_value(), "omega_hi");
            bi = ctx.r_ih->transpose() * w.value + ctx.omega_hi->value;
            break;
        case Frame::HI:
            throw ArgumentError("omega_convert: HI is a geometry rate, not convertible");
    }
    switch (to) {
        case Frame::BI:
            return {bi, Frame::BI};
        case Frame::IB:
            need(ctx.r_bi.has_value(), "r_bi");
            return {-ctx.r_bi->transpose() * bi, Frame::IB};
        case Frame::BH:
            need(ctx.r_ih.has_value(), "r_ih");
            need(ctx.omega_hi.has_value(), "omega_hi");
            return {(*ctx.r_ih) * (bi - ctx.omega_hi->value), Frame::BH};
        case Frame::HI:
            break;
    }
    throw ArgumentError("omega_convert: cannot convert into HI");
}

Mat3 rate_matrix(const Mat3& r_hi_prev, const Mat3& r_hi_next, double dt) {
    const Mat3 rdot = (r_hi_next - r_hi_prev) / dt;
    const Mat3 rmid = 0.5 * (r_hi_prev + r_hi_next);
    return rdot * rmid.transpose();
}

AngularVelocity omega_hi(const GeometryFn& geometry, double t, double dt) {
    if (!(dt > 0)) throw ArgumentError("omega_hi: dt must be positive");
    const auto [v0, s0] = geometry(t - 0.5 * dt);
    const auto [v1, s1] = geometry(t + 0.5 * dt);
    const Mat3 r0 = h_frame(v0, s0).transpose();
    const Mat3 r1 = h_frame(v1, s1).transpose();
    return {vee(rate_matrix(r0, r1, dt)), Frame::HI};
}

std::vector<UnitQuaternion> uniform_quaternion_sample(int count, std::uint64_t seed) {
    if (count < 1) throw ArgumentError("uniform_quaternion_sample: count must be >= 1");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<Vec4> pts(count);
    for (auto& p : pts) {
        p = Vec4(gauss(rng), gauss(rng), gauss(rng), gauss(rng)).normalized();
    }
    if (count > 1) {
        // Riesz s=2 energy over antipodal pairs {q, -q}; the step is scaled
        // against the expected nearest-neighbour spacing and decays linearly.
        const double spacing = std::pow(kPi * kPi / count, 1.0 / 3.0);
        constexpr int kSteps = 200;
        std::vector<Vec4> force(count);
        for (int step = 0; step < kSteps; ++step) {
            for (auto& f : force) f.setZero();
            for (int i = 0; i < count; ++i) {
                for (int j = i + 1; j < count; ++j) {
                    const Vec4 dm = pts[i] - pts[j];
                    const Vec4 dp = pts[i] + pts[j];
                    const double m2 = std::max(dm.squaredNorm(), 1e-12);
                    const double p2 = std::max(dp.squaredNorm(), 1e-12);
                    const Vec4 fm = dm / (m2 * m2);
                    const Vec4 fp = dp / (p2 * p2);
                    force[i] += fm + fp;
                    force[j] += fp - fm;
                }
            }
            double fmax = 0;
            for (int i = 0; i < count; ++i) {
                force[i] -= force[i].dot(pts[i]) * pts[i];
                fmax = std::max(fmax, force[i].norm());
            }
            if (fmax < 1e-300) break;
            const double scale = 0.2 * spacing * (1.0 - double(step) / kSteps) / fmax;
            for (int i = 0; i < count; ++i) pts[i] = (pts[i] + scale * force[i]).normalized();
        }
    }
    std::vector<UnitQuaternion> out;
    out.reserve(count);
    for (const auto& p : pts) {
        UnitQuaternion q = UnitQuaternion::from_coeffs(p);
        out.push_back(q.w() < 0 ? -q : q);
    }
    return out;
}

AttitudeHistory::AttitudeHistory(std::vector<double> times, std::vector<UnitQuaternion> quats)
    : times_(std::move(times)), quats_(std::move(quats)) {
    if (times_.size() != quats_.size()) {
        throw ArgumentError("AttitudeHistory: times and quaternions differ in length");
    }
    if (times_.size() < 2) throw ArgumentError("AttitudeHistory: need at least 2 samples");
    for (std::size_t i = 1; i < times_.size(); ++i) {
        if (!(times_[i] > times_[i - 1])) {
            throw ArgumentError("AttitudeHistory: times must be strictly increasing (index " +
                                std::to_string(i) + ")");
        }
        if (quats_[i].dot(quats_[i - 1]) < 0) quats_[i] = -quats_[i];
    }
}

}  // namespace lcinv
