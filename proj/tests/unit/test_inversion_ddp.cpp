#include <doctest.h>

#include "helpers.hpp"
#include "lcinv/inversion_ddp.hpp"

using namespace lcinv;
using namespace lcinv::ddp;
using testutil::random_quat;
using testutil::random_unit;

namespace {

// Truth node over the first n samples of a tracklet.
TrajectoryNode truth_node(const sim::Tracklet& t, std::size_t n) {
    TrajectoryNode node;
    for (std::size_t i = 0; i < n; ++i) node.states.push_back({t.truth->quats[i], t.truth->omega_bi_mid});
    node.controls.assign(n - 1, Vec3::Zero());
    return node;
}

Eigen::Matrix<double, 6, 1> tangent_diff(const DdpState& a, const DdpState& b) {
    Eigen::Matrix<double, 6, 1> d;
    d << to_rotation_vector(a.q * b.q.conjugate()), a.w - b.w;
    return d;
}

}  // namespace

TEST_CASE("transition") {
    SUBCASE("quarter turn about z") {
        const DdpState x{UnitQuaternion(), Vec3(0, 0, kPi / 2)};
        const auto y = step(x, Vec3::Zero(), 1.0);
        const Mat3 oracle = Eigen::AngleAxisd(kPi / 2, Vec3::UnitZ()).toRotationMatrix();
        CHECK((to_matrix(y.q) - oracle).norm() < 1e-14);
        CHECK((y.w - x.w).norm() == 0.0);
    }
    SUBCASE("rotation acts in the inertial frame, controls integrate the rate") {
        std::mt19937_64 g(51);
        const DdpState x{random_quat(g), 0.2 * random_unit(g)};
        const Vec3 u = 0.01 * random_unit(g);
        const auto y = step(x, u, 0.5);
        const Mat3 oracle = Eigen::AngleAxisd(0.5 * x.w.norm(), x.w.normalized()).toRotationMatrix() * to_matrix(x.q);
        CHECK((to_matrix(y.q) - oracle).norm() < 1e-14);
        CHECK((y.w - (x.w + 0.5 * u)).norm() < 1e-15);
    }
    SUBCASE("constant rate reproduces a fixed-axis history") {
        std::mt19937_64 g(52);
        const auto q0 = random_quat(g);
        const Vec3 w = 2 * kRpm * random_unit(g);
        std::vector<double> times(100);
        for (int i = 0; i < 100; ++i) times[i] = i;
        const auto hist = sim::fixed_axis_history(q0, w, times);
        DdpState x{q0, w};
        for (int i = 1; i < 100; ++i) {
            x = step(x, Vec3::Zero(), 1.0);
            CHECK(angular_distance(x.q, hist[i]) < 1e-10);
        }
    }
}

TEST_CASE("linearization matches finite differences") {
    std::mt19937_64 g(53);
    for (int rep = 0; rep < 20; ++rep) {
        const DdpState x{random_quat(g), 0.3 * random_unit(g)};
        const double dt = 0.7;
        const auto lin = linearize_step(x, dt);
        const auto y = step(x, Vec3::Zero(), dt);
        const double h = 1e-6;
        Eigen::Matrix<double, 6, 6> a_fd;
        Eigen::Matrix<double, 6, 3> b_fd;
        for (int k = 0; k < 6; ++k) {
            Eigen::Matrix<double, 6, 1> e = Eigen::Matrix<double, 6, 1>::Zero();
            e[k] = h;
            const DdpState xp{from_rotation_vector(e.head<3>()) * x.q, x.w + e.tail<3>()};
            const DdpState xm{from_rotation_vector(-e.head<3>()) * x.q, x.w - e.tail<3>()};
            a_fd.col(k) = (tangent_diff(step(xp, Vec3::Zero(), dt), y) - tangent_diff(step(xm, Vec3::Zero(), dt), y)) / (2 * h);
        }
        for (int k = 0; k < 3; ++k) {
            Vec3 du = Vec3::Zero();
            du[k] = h;
            b_fd.col(k) = (tangent_diff(step(x, du, dt), y) - tangent_diff(step(x, -du, dt), y)) / (2 * h);
        }
        CHECK((lin.a - a_fd).cwiseAbs().maxCoeff() < 1e-6);
        CHECK((lin.b - b_fd).cwiseAbs().maxCoeff() < 1e-6);
    }
}

TEST_CASE("path loss and node losses") {
    const auto& trk = testutil::dataset1_fixture().front();
    const auto cube = facet::make_cube();
    std::mt19937_64 g(54);
    TrajectoryNode node;
    for (int i = 0; i < 10; ++i) node.states.push_back({random_quat(g), 0.1 * random_unit(g)});
    for (int i = 0; i < 9; ++i) node.controls.push_back(0.01 * random_unit(g));
    const double eta = 3.0;
    const auto l = node_losses(node, trk, cube, eta);
    double meas = 0, ctrl = 0;
    for (std::size_t i = 0; i < 10; ++i) {
        const Mat3 r = to_matrix(node.states[i].q);
        meas += (trk.spectra[i] - facet::lambert_spectrum(cube, r.transpose() * trk.v_I[i], r.transpose() * trk.s_I[i]))
                    .squaredNorm();
    }
    for (const auto& u : node.controls) ctrl += eta * u.squaredNorm();
    CHECK(l.measurement == doctest::Approx(meas).epsilon(1e-12));
    CHECK(l.control == doctest::Approx(ctrl).epsilon(1e-12));
    double sum = 0;
    for (std::size_t i = 0; i < 9; ++i) sum += path_loss(node.states[i], node.controls[i], trk, i, cube, eta);
    sum += path_loss(node.states[9], Vec3::Zero(), trk, 9, cube, eta);
    CHECK(sum == doctest::Approx(l.total()).epsilon(1e-12));
}

TEST_CASE("iLQR") {
    const auto& trk = testutil::dataset1_fixture().front();
    const auto cube = facet::make_cube();
    DdpOptions opt;
    opt.eta_alpha = 10.0;
    SUBCASE("truth stays put") {
        auto node = truth_node(trk, 20);
        node.cost = node_losses(node, trk, cube, opt.eta_alpha).total();
        const auto out = ddp_optimize(node, trk, cube, opt);
        CHECK(out.cost < 1e-20);
        for (std::size_t i = 0; i < 20; ++i) CHECK(angular_distance(out.states[i].q, trk.truth->quats[i]) < 1e-8);
    }
    SUBCASE("cost decreases from a small perturbation") {
        std::mt19937_64 g(55);
        auto node = truth_node(trk, 20);
        node.states[0].q = from_rotation_vector(5 * kDeg * random_unit(g)) * node.states[0].q;
        node.states[0].w += 0.01 * random_unit(g);
        for (std::size_t i = 0; i + 1 < 20; ++i) node.states[i + 1] = step(node.states[i], node.controls[i], 1.0);
        const double before = node_losses(node, trk, cube, opt.eta_alpha).total();
        const auto out = ddp_optimize(node, trk, cube, opt);
        CHECK(out.cost < 0.1 * before);
        // Stored V matches a recomputation, and the result obeys the dynamics.
        CHECK(out.cost == doctest::Approx(node_losses(out, trk, cube, opt.eta_alpha).total()).epsilon(1e-8));
        for (std::size_t i = 0; i + 1 < 20; ++i)
            CHECK(tangent_diff(step(out.states[i], out.controls[i], 1.0), out.states[i + 1]).norm() < 1e-12);
    }
    SUBCASE("expand adds one sample") {
        auto node = truth_node(trk, 12);
        node.cost = node_losses(node, trk, cube, opt.eta_alpha).total();
        const auto out = expand(node, trk, cube, opt);
        CHECK(out.size() == 13);
        CHECK(out.controls.size() == 12);
        CHECK(out.expansions == node.expansions + 1);
        CHECK(out.cost == doctest::Approx(node_losses(out, trk, cube, opt.eta_alpha).total()).epsilon(1e-8));
    }
}

TEST_CASE("best-first heuristic") {
    CHECK(heuristic(2.0, 4, 39, 0) == doctest::Approx(3.75));
    CHECK(heuristic(2.0, 4, 8, 0) == 0.0);
    HeuristicParams p;
    p.k0 = 10;
    CHECK(heuristic(2.0, 4, 39, 12, p) == doctest::Approx(3.75 * std::pow(1.001, 2)));
}

TEST_CASE("best-first search") {
    const auto& full = testutil::dataset1_fixture().front();
    const auto trk = full.slice(0, 25);
    const auto cube = facet::make_cube();
    BestFirstOptions opt;
    opt.initial_count = 16;
    SUBCASE("deterministic") {
        const auto a = best_first_invert(trk, cube, opt);
        const auto b = best_first_invert(trk, cube, opt);
        CHECK(a.pops == b.pops);
        CHECK(a.success == b.success);
        REQUIRE(a.node.size() == b.node.size());
        for (std::size_t i = 0; i < a.node.size(); ++i) CHECK(a.node.states[i].q.coeffs() == b.node.states[i].q.coeffs());
        CHECK(a.expansions_by_length == b.expansions_by_length);
    }
    SUBCASE("a single initial node is a plain expansion loop") {
        std::mt19937_64 g(56);
        opt.initial_attitudes = {random_quat(g)};
        const auto res = best_first_invert(trk, cube, opt);
        REQUIRE(res.success);
        DdpOptions d = opt.ddp;
        d.eta_alpha = opt.eta_alpha_scale * opt.eta * 1.0;
        TrajectoryNode node;
        node.states.push_back({opt.initial_attitudes[0], Vec3::Zero()});
        node = ddp_optimize(node, trk, cube, d);
        while (node.size() < trk.size()) node = expand(node, trk, cube, d);
        for (std::size_t i = 0; i < node.size(); ++i) CHECK(node.states[i].q.coeffs() == res.node.states[i].q.coeffs());
        CHECK(res.pops == long(trk.size()) - 2);
    }
    SUBCASE("reported losses match a recomputation") {
        const auto res = best_first_invert(trk, cube, opt);
        const double eta_alpha = opt.eta_alpha_scale * opt.eta * 1.0;
        const auto l = node_losses(res.node, trk, cube, eta_alpha);
        CHECK(res.losses.total() == doctest::Approx(l.total()).epsilon(1e-12));
        CHECK(res.node.cost == doctest::Approx(l.total()).epsilon(1e-8));
        long total = 0;
        for (long e : res.expansions_by_length) total += e;
        CHECK(total == res.pops + opt.initial_count);
        if (res.success) CHECK(res.history->size() == trk.size());
    }
    SUBCASE("pop cap returns a partial node") {
        opt.max_pops = 3;
        const auto res = best_first_invert(trk, cube, opt);
        CHECK_FALSE(res.success);
        CHECK_FALSE(res.history.has_value());
        CHECK(res.node.size() < trk.size());
    }
}
