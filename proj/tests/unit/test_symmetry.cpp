#include <doctest.h>

#include <sstream>

#include "helpers.hpp"
#include "lcinv/symmetry.hpp"

using namespace lcinv;
using namespace lcinv::sym;
using testutil::random_quat;
using testutil::random_unit;

namespace {

// Slowly varying analytic geometry with a well-defined H frame throughout.
std::pair<Vec3, Vec3> test_geometry(double t) {
    const double a = 0.01 * t;
    return {Vec3(std::cos(a), std::sin(a), 0.2).normalized(), Vec3(0.3, -0.5, 0.8).normalized()};
}

struct Scenario {
    std::vector<double> times;
    std::vector<Vec3> v, s;
    Vec3 omega;
    AttitudeHistory truth;
};

Scenario make_scenario(double dt, int n, std::uint64_t seed) {
    std::mt19937_64 g(seed);
    std::vector<double> times(n);
    for (int i = 0; i < n; ++i) times[i] = i * dt;
    const Vec3 w = 2.0 * kRpm * random_unit(g);
    auto hist = sim::fixed_axis_history(random_quat(g), w, times);
    Scenario sc{times, {}, {}, w, std::move(hist)};
    for (double t : times) {
        const auto [v, s] = test_geometry(t);
        sc.v.push_back(v);
        sc.s.push_back(s);
    }
    return sc;
}

Mat3 rz(double a) { return Eigen::AngleAxisd(a, Vec3::UnitZ()).toRotationMatrix(); }

}  // namespace

TEST_CASE("H-frame group") {
    const auto g = h_group();
    REQUIRE(g.size() == 4);
    CHECK(g[0].label == HLabel::I);
    CHECK(std::string(label_name(HLabel::TH3)) == "T_H3");
    // Closed under composition, every element an involution.
    for (const auto& a : g) {
        CHECK((a.matrix * a.matrix - Mat3::Identity()).norm() == 0.0);
        for (const auto& b : g) {
            bool closed = false;
            for (const auto& c : g) closed = closed || (a.matrix * b.matrix - c.matrix).norm() == 0.0;
            CHECK(closed);
        }
    }
    // In H coordinates v = (c, s, 0) and s = (c, -s, 0): T_H1 and T_H3 swap them,
    // T_H2 and I fix them.
    const Vec3 v(0.8, 0.6, 0), s(0.8, -0.6, 0);
    for (const auto& e : g) {
        const bool swaps = e.label == HLabel::TH1 || e.label == HLabel::TH3;
        CHECK(((e.matrix * v - (swaps ? s : v)).norm()) == 0.0);
        CHECK(((e.matrix * s - (swaps ? v : s)).norm()) == 0.0);
    }
    CHECK(h_element(HLabel::TH2).matrix.determinant() == doctest::Approx(-1.0));
}

TEST_CASE("symmetric histories replay the observed spectra") {
    const auto sc = make_scenario(1.0, 40, 21);
    SUBCASE("asymmetric cube: I and T_H3 only") {
        const auto cube = facet::make_cube();
        const auto sets = symmetric_histories(sc.truth, sc.v, sc.s, cube);
        REQUIRE(sets.size() == 2);
        CHECK(sets[0].t_h == HLabel::I);
        CHECK(sets[1].t_h == HLabel::TH3);
        const auto ref = sim::replay_spectra(cube, sc.truth, sc.v, sc.s);
        for (std::size_t i = 0; i < sc.times.size(); ++i)
            CHECK(angular_distance(sets[0].history[i], sc.truth[i]) < 1e-12);
        for (const auto& h : sets) {
            const auto rep = sim::replay_spectra(cube, h.history, sc.v, sc.s);
            for (std::size_t i = 0; i < ref.size(); ++i) CHECK((rep[i] - ref[i]).cwiseAbs().maxCoeff() < 1e-10);
        }
        CHECK(angular_distance(sets[1].history[5], sc.truth[5]) > 0.1);
    }
    SUBCASE("xz-symmetric cube: four sets, reflections paired with the body mirror") {
        const auto obj = facet::make_cube_xz_symmetric();
        const auto sets = symmetric_histories(sc.truth, sc.v, sc.s, obj);
        REQUIRE(sets.size() == 4);
        const auto ref = sim::replay_spectra(obj, sc.truth, sc.v, sc.s);
        for (const auto& h : sets) {
            const double det_h = h_element(h.t_h).matrix.determinant();
            const double det_b = obj.symmetry_group()[h.t_b].determinant();
            CHECK(det_h * det_b == doctest::Approx(1.0));
            for (std::size_t i = 0; i < sc.times.size(); ++i)
                CHECK(to_matrix(h.history[i]).determinant() == doctest::Approx(1.0));
            const auto rep = sim::replay_spectra(obj, h.history, sc.v, sc.s);
            for (std::size_t i = 0; i < ref.size(); ++i) CHECK((rep[i] - ref[i]).cwiseAbs().maxCoeff() < 1e-10);
        }
    }
    SUBCASE("degenerate geometry names the sample") {
        auto s = sc.s;
        s[7] = sc.v[7];
        try {
            symmetric_histories(sc.truth, sc.v, s, facet::make_cube());
            FAIL("expected DegenerateGeometryError");
        } catch (const DegenerateGeometryError& e) {
            CHECK(std::string(e.what()).find("7") != std::string::npos);
        }
    }
}

TEST_CASE("symmetric angular velocities match finite differences of the symmetric histories") {
    const double dt = 0.1;
    const auto sc = make_scenario(dt, 200, 22);
    const auto obj = facet::make_cube_xz_symmetric();
    const std::vector<Vec3> w(sc.times.size(), sc.omega);
    const auto omegas = symmetric_omegas(sc.times, w, test_geometry, obj);
    const auto sets = symmetric_histories(sc.truth, sc.v, sc.s, obj);
    REQUIRE(omegas.size() == 4);
    for (const auto& h : sets) {
        const auto it = std::find_if(omegas.begin(), omegas.end(), [&](const auto& o) { return o.t_h == h.t_h; });
        REQUIRE(it != omegas.end());
        double worst = 0;
        for (std::size_t i = 1; i + 2 < sc.times.size(); ++i) {
            const Vec3 fd = omega_from_quat_pair(h.history[i], h.history[i + 1], dt).value;
            const Vec3 mid = 0.5 * (it->omega_bi[i] + it->omega_bi[i + 1]);
            worst = std::max(worst, (fd - mid).norm());
        }
        CHECK(worst / sc.omega.norm() < 1e-3);
    }
    // Identity element reproduces the input.
    for (std::size_t i = 0; i < w.size(); ++i) CHECK((omegas[0].omega_bi[i] - sc.omega).norm() < 1e-12);

    // Without body symmetry only the proper H elements survive.
    CHECK(symmetric_omegas(sc.times, w, test_geometry, facet::make_cube()).size() == 2);
}

TEST_CASE("BH-frame targets") {
    std::mt19937_64 g(23);
    for (int k = 0; k < 50; ++k) {
        const Vec3 v = random_unit(g), s = random_unit(g);
        const Mat3 r_ih = h_frame(v, s);
        const Vec3 w_bi = random_unit(g) * 0.2, w_hi = random_unit(g) * 1e-3;
        const auto t = omega_bh_targets(w_bi, r_ih, w_hi);
        const Vec3 oracle = r_ih * w_bi - r_ih * w_hi;
        CHECK((t.w_BH - oracle).norm() < 1e-14);
        CHECK(t.w_BH_S.x() == t.w_BH.x());
        CHECK(t.w_BH_S.y() == std::abs(t.w_BH.y()));
        CHECK(t.w_BH_S.z() == std::abs(t.w_BH.z()));
        CHECK(t.abs_w_BH.minCoeff() >= 0.0);
        CHECK((t.abs_w_BI - w_bi.cwiseAbs()).norm() == 0.0);
    }
}

TEST_CASE("Euler view and sun directions") {
    const double alpha = 0.7;
    SUBCASE("zero angles") {
        const auto [v, s] = euler_view_sun(0, 0, 0, alpha);
        CHECK((v - Vec3(std::cos(alpha / 2), std::sin(alpha / 2), 0)).norm() < 1e-15);
        CHECK((s - Vec3(std::cos(alpha / 2), -std::sin(alpha / 2), 0)).norm() < 1e-15);
    }
    SUBCASE("phase angle and bisector") {
        std::mt19937_64 g(24);
        std::uniform_real_distribution<double> u(-kPi, kPi);
        for (int k = 0; k < 100; ++k) {
            const double th = u(g), ph = 0.5 * u(g), ps = u(g);
            const auto [v, s] = euler_view_sun(th, ph, ps, alpha);
            CHECK(phase_angle(v, s) == doctest::Approx(alpha));
            const Mat3 r = rz(th) * Eigen::AngleAxisd(-ph, Vec3::UnitY()).toRotationMatrix() *
                           Eigen::AngleAxisd(ps, Vec3::UnitX()).toRotationMatrix();
            CHECK(((v + s).normalized() - r * Vec3::UnitX()).norm() < 1e-12);
            // The H frame built from (v_B, s_B) is r^T.
            CHECK((h_frame(v, s) - r.transpose()).norm() < 1e-12);
        }
    }
}

TEST_CASE("single-spectrum cost surface") {
    const auto cube = facet::make_cube();
    const double alpha = 32 * kDeg;
    SUBCASE("swap invariance") {
        std::mt19937_64 g(25);
        const facet::Spectrum obs = facet::lambert_spectrum(cube, random_unit(g), random_unit(g));
        for (int k = 0; k < 50; ++k) {
            const Vec3 v = random_unit(g), s = random_unit(g);
            CHECK(single_spectrum_cost(cube, obs, v, s) == single_spectrum_cost(cube, obs, s, v));
        }
        CHECK_THROWS_AS(single_spectrum_cost(cube, facet::Spectrum::Zero(3), Vec3::UnitX(), Vec3::UnitY()), ArgumentError);
    }
    SUBCASE("minimum at the generating angles") {
        // Generated at the origin: psi = 0 is on the roll grid.
        const auto [v0, s0] = euler_view_sun(0.3, 0.2, 0.0, alpha);
        const facet::Spectrum obs = facet::lambert_spectrum(cube, v0, s0);
        const auto theta = linspace(0.3 - 0.5, 0.3 + 0.5, 11);
        const auto phi = linspace(0.2 - 0.4, 0.2 + 0.4, 9);
        const auto surf = cost_surface_scan(cube, obs, alpha, theta, phi, 64, 2);
        CHECK(surf.cost.rows() == 9);
        CHECK(surf.cost.cols() == 11);
        Eigen::Index r, c;
        const double m = surf.cost.minCoeff(&r, &c);
        CHECK(m < 1e-20);
        CHECK(r == 4);
        CHECK(c == 5);
        CHECK(surf.cost.minCoeff() >= 0.0);
        // Worker count does not change the result.
        const auto one = cost_surface_scan(cube, obs, alpha, theta, phi, 64, 1);
        CHECK((one.cost - surf.cost).norm() == 0.0);
        // Brute-force oracle at one grid point.
        double best = 1e300;
        for (int k = 0; k < 64; ++k) {
            const auto [v, s] = euler_view_sun(theta[2], phi[3], 2 * kPi * k / 64, alpha);
            best = std::min(best, (obs - facet::lambert_spectrum(cube, v, s)).squaredNorm());
        }
        CHECK(surf.cost(3, 2) == doctest::Approx(best).epsilon(1e-12));
    }
    SUBCASE("csv layout") {
        CostSurface s;
        s.theta = {0.0, 1.0};
        s.phi = {0.5};
        s.cost = Eigen::MatrixXd::Constant(1, 2, 2.0);
        s.best_psi = Eigen::MatrixXd::Zero(1, 2);
        CHECK(cost_surface_csv(s) == "phi\\theta,0,1\n0.5,2,2\n");
    }
    CHECK(linspace(0, 1, 5) == std::vector<double>{0, 0.25, 0.5, 0.75, 1});
    CHECK_THROWS_AS(linspace(0, 1, 1), ArgumentError);
}
