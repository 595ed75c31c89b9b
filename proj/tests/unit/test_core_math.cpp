#include <doctest.h>

#include <Eigen/Geometry>

#include "helpers.hpp"
#include "lcinv/core_math.hpp"

using namespace lcinv;
using testutil::random_quat;
using testutil::random_unit;

namespace {

// Independent oracle: Eigen's own quaternion/matrix conversion.
Mat3 eigen_matrix(const UnitQuaternion& q) { return Eigen::Quaterniond(q.w(), q.x(), q.y(), q.z()).toRotationMatrix(); }

}  // namespace

TEST_CASE("unit quaternion normalizes and rejects zero") {
    UnitQuaternion q(2, 0, 0, 0);
    CHECK(q.w() == doctest::Approx(1.0));
    CHECK_THROWS_AS(UnitQuaternion(0, 0, 0, 0), ArgumentError);
}

TEST_CASE("convention: q is R_BI and rotate maps body to inertial") {
    const UnitQuaternion q = from_axis_angle(Vec3::UnitZ(), kPi / 2);
    // Body x axis lands on inertial y under a +90 deg turn about z.
    CHECK((rotate(q, Vec3::UnitX()) - Vec3::UnitY()).norm() < 1e-15);
    CHECK((to_matrix(q) - eigen_matrix(q)).norm() < 1e-15);
}

TEST_CASE("two 90 deg turns about x compose to a half turn") {
    const UnitQuaternion a = from_axis_angle(Vec3::UnitX(), kPi / 2);
    const Mat3 oracle = Eigen::AngleAxisd(kPi, Vec3::UnitX()).toRotationMatrix();
    CHECK((to_matrix(a * a) - oracle).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(rotation_angle(a * a) == doctest::Approx(kPi).epsilon(1e-12));
}

TEST_CASE("matrix of a product is the product of matrices") {
    std::mt19937_64 g(1);
    for (int k = 0; k < 500; ++k) {
        const auto a = random_quat(g), b = random_quat(g);
        CHECK((to_matrix(a * b) - eigen_matrix(a) * eigen_matrix(b)).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("rotate preserves norm and from_matrix inverts to_matrix") {
    std::mt19937_64 g(2);
    std::normal_distribution<double> n;
    for (int k = 0; k < 500; ++k) {
        const auto q = random_quat(g);
        const Vec3 u(n(g), n(g), n(g));
        CHECK(std::abs(rotate(q, u).norm() - u.norm()) < 1e-12);
        CHECK(angular_distance(from_matrix(to_matrix(q)), q) < 1e-10);
    }
}

TEST_CASE("left and right multiplication matrices") {
    std::mt19937_64 g(3);
    for (int k = 0; k < 100; ++k) {
        const Vec4 a = random_quat(g).coeffs() * 1.7, b = random_quat(g).coeffs() * 0.3;
        CHECK((hamilton(a, b) - left_mult_matrix(a) * b).norm() < 1e-14);
        CHECK((hamilton(a, b) - right_mult_matrix(b) * a).norm() < 1e-14);
        CHECK((hamilton(a, quat_conj(a)) - Vec4(a.squaredNorm(), 0, 0, 0)).norm() < 1e-14);
    }
}

TEST_CASE("rotation vector round trip and exp map") {
    std::mt19937_64 g(4);
    for (int k = 0; k < 200; ++k) {
        const Vec3 axis = random_unit(g);
        const double ang = 3.0 * (k + 0.5) / 200.0;
        const Vec3 phi = axis * ang;
        CHECK((to_rotation_vector(from_rotation_vector(phi)) - phi).norm() < 1e-12);
        const Mat3 oracle = Eigen::AngleAxisd(ang, axis).toRotationMatrix();
        CHECK((to_matrix(from_rotation_vector(phi)) - oracle).cwiseAbs().maxCoeff() < 1e-12);
    }
    CHECK(to_rotation_vector(UnitQuaternion::identity()).norm() == 0.0);
}

TEST_CASE("angular distance is sign-insensitive") {
    std::mt19937_64 g(5);
    const auto q = random_quat(g);
    CHECK(angular_distance(q, -q) < 1e-12);
    CHECK(angular_distance(q, from_axis_angle(Vec3::UnitY(), 0.3) * q) == doctest::Approx(0.3).epsilon(1e-10));
}

TEST_CASE("skew, vee and the SO(3) left Jacobian") {
    std::mt19937_64 g(6);
    const Vec3 a = random_unit(g), b = random_unit(g);
    CHECK((skew(a) * b - a.cross(b)).norm() < 1e-15);
    CHECK((vee(skew(a)) - a).norm() < 1e-15);
    // exp(phi + d) ~ exp(J_l(phi) d) exp(phi), checked by finite differences.
    const Vec3 phi = 1.3 * random_unit(g);
    const Mat3 jl = so3_left_jacobian(phi);
    const double h = 1e-6;
    for (int k = 0; k < 3; ++k) {
        Vec3 d = Vec3::Zero();
        d[k] = h;
        const Vec3 col = to_rotation_vector(from_rotation_vector(phi + d) * from_rotation_vector(phi).conjugate()) / h;
        CHECK((col - jl.col(k)).norm() < 1e-5);
    }
    CHECK((so3_left_jacobian(Vec3::Zero()) - Mat3::Identity()).norm() < 1e-15);
}

TEST_CASE("omega_from_quat_pair") {
    SUBCASE("small rotation about z converges to delta/dt") {
        double prev_err = 1;
        for (double delta : {1e-1, 1e-2, 1e-3}) {
            const auto w = omega_from_quat_pair(UnitQuaternion::identity(), from_axis_angle(Vec3::UnitZ(), delta), 1.0);
            const double err = std::abs(w.value.z() - delta);
            CHECK(err < prev_err);
            CHECK(w.value.head<2>().norm() < 1e-15);
            prev_err = err;
        }
        CHECK(prev_err < 1e-9);
    }
    SUBCASE("2 RPM fixed-axis sequence at 1 s") {
        const Vec3 w_true = 2.0 * kRpm * Vec3(1, 2, 2).normalized();
        std::vector<double> times;
        for (int i = 0; i < 20; ++i) times.push_back(i);
        const auto h = sim::fixed_axis_history(UnitQuaternion(0.3, 0.1, -0.5, 0.8), w_true, times);
        for (std::size_t i = 0; i + 1 < h.size(); ++i) {
            const auto w = omega_from_quat_pair(h[i], h[i + 1], 1.0);
            CHECK(w.frame == Frame::BI);
            CHECK(std::abs(w.value.norm() - w_true.norm()) < 0.01 * w_true.norm());
        }
    }
    SUBCASE("forward difference error is O(dt)") {
        const Vec3 w_true(0.2, -0.1, 0.3);
        const UnitQuaternion q0(0.9, 0.1, 0.2, 0.3);
        auto err = [&](double dt) {
            return (omega_from_quat_pair(q0, from_rotation_vector(w_true * dt) * q0, dt).value - w_true).norm();
        };
        // Vector-part truncation error is cubic in the step angle, so it
        // shrinks at least linearly.
        CHECK(err(0.05) < 0.6 * err(0.1));
        CHECK(err(0.025) < 0.6 * err(0.05));
    }
    CHECK_THROWS_AS(omega_from_quat_pair(UnitQuaternion(), UnitQuaternion(), 0.0), ArgumentError);
}

TEST_CASE("h_frame properties") {
    std::mt19937_64 g(7);
    for (int k = 0; k < 1000; ++k) {
        const Vec3 v = random_unit(g), s = random_unit(g);
        if (std::abs(v.dot(s)) > 0.999) continue;
        const Mat3 r = h_frame(v, s);
        CHECK(std::abs(r.determinant() - 1.0) < 1e-12);
        CHECK((r * r.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(std::abs(r.row(0).dot(r.row(2))) < 1e-12);
        // Oracle rows built directly from the definitions.
        const Vec3 h = (v + s).normalized(), j = s.cross(v).normalized(), i = j.cross(h);
        CHECK((r.row(0).transpose() - h).norm() < 1e-12);
        CHECK((r.row(2).transpose() - j).norm() < 1e-12);
        CHECK((r.row(1).transpose() - i).norm() < 1e-12);
        // In H, both directions lie in the xy plane, mirrored about x.
        const Vec3 s_h = r * s, v_h = r * v;
        CHECK(std::abs(s_h.z()) < 1e-12);
        CHECK(std::abs(v_h.z()) < 1e-12);
        CHECK(s_h.y() < 0);
        CHECK(std::abs(s_h.y() + v_h.y()) < 1e-12);
        CHECK(std::abs(s_h.x() - v_h.x()) < 1e-12);
        // Swapping v and s flips j and keeps h.
        const Mat3 rs = h_frame(s, v);
        CHECK((rs.row(0) - r.row(0)).norm() < 1e-12);
        CHECK((rs.row(2) + r.row(2)).norm() < 1e-12);
    }
    CHECK_THROWS_AS(h_frame(Vec3::UnitX(), Vec3::UnitX()), DegenerateGeometryError);
    CHECK_THROWS_AS(h_frame(Vec3::UnitX(), -Vec3::UnitX()), DegenerateGeometryError);
}

TEST_CASE("phase angle") {
    CHECK(phase_angle(Vec3::UnitX(), Vec3::UnitY()) == doctest::Approx(kPi / 2));
    CHECK(phase_angle(Vec3(1, 0, 0), Vec3(std::cos(0.3), std::sin(0.3), 0)) == doctest::Approx(0.3));
}

TEST_CASE("omega_convert round trips") {
    std::mt19937_64 g(8);
    for (int k = 0; k < 100; ++k) {
        const Vec3 v = random_unit(g), s = random_unit(g);
        const AngularVelocity w{Vec3(0.1, -0.2, 0.05) * (k + 1) / 50.0, Frame::BI};
        FrameContext ctx;
        ctx.r_bi = to_matrix(random_quat(g));
        ctx.r_ih = h_frame(v, s);
        ctx.omega_hi = AngularVelocity{Vec3(1e-3, 2e-3, -1e-3), Frame::HI};
        const auto bh = omega_convert(w, Frame::BH, ctx);
        CHECK(bh.frame == Frame::BH);
        CHECK((omega_convert(bh, Frame::BI, ctx).value - w.value).norm() < 1e-12);
        const auto ib = omega_convert(w, Frame::IB, ctx);
        CHECK((omega_convert(ib, Frame::BI, ctx).value - w.value).norm() < 1e-12);
        CHECK((ib.value + ctx.r_bi->transpose() * w.value).norm() < 1e-15);
    }
    CHECK_THROWS_AS(omega_convert({Vec3::Zero(), Frame::BI}, Frame::IB, FrameContext{}), ArgumentError);
}

TEST_CASE("omega_hi: bisector moves at half the rate") {
    const double rate = 0.01;
    const Vec3 s = Vec3::UnitX();
    // v turns about the fixed normal z = j at rate `rate`.
    GeometryFn geo = [&](double t) {
        const double a = 1.0 + rate * t;
        return std::make_pair(Vec3(std::cos(a), std::sin(a), 0.0), s);
    };
    for (double t : {0.0, 10.0, 50.0}) {
        const Vec3 w = omega_hi(geo, t, 1.0).value;
        CHECK(w.norm() == doctest::Approx(rate / 2).epsilon(1e-6));
        // W = dR R^T is skew-symmetric to first order.
        const Mat3 a = h_frame(geo(t - 0.5).first, s).transpose();
        const Mat3 b = h_frame(geo(t + 0.5).first, s).transpose();
        const Mat3 wm = rate_matrix(a, b, 1.0);
        CHECK((wm + wm.transpose()).cwiseAbs().maxCoeff() < 1e-6 * rate);
    }
}

TEST_CASE("uniform quaternion sample") {
    const auto a = uniform_quaternion_sample(512, 11);
    const auto b = uniform_quaternion_sample(512, 11);
    REQUIRE(a.size() == 512);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].coeffs() == b[i].coeffs());
    // Coverage oracle: random rotations are never far from the cover.
    std::mt19937_64 g(99);
    double worst = 0;
    for (int k = 0; k < 4000; ++k) {
        const auto q = random_quat(g);
        double best = kPi;
        for (const auto& p : a) best = std::min(best, angular_distance(p, q));
        worst = std::max(worst, best);
    }
    CHECK(worst < 25.0 * kDeg);
    CHECK_THROWS_AS(uniform_quaternion_sample(0, 1), ArgumentError);
}

TEST_CASE("attitude history enforces sign continuity") {
    std::vector<double> t{0, 1, 2};
    const auto q = from_axis_angle(Vec3::UnitZ(), 0.1);
    AttitudeHistory h(t, {q, -(q * q), q * q * q});
    for (std::size_t i = 0; i + 1 < h.size(); ++i) CHECK(h[i].dot(h[i + 1]) >= 0);
    CHECK_THROWS_AS(AttitudeHistory({0, 0}, {q, q}), ArgumentError);
    CHECK_THROWS_AS(AttitudeHistory({0}, {q}), ArgumentError);
}
