#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "lcinv/core_math.hpp"
#include "lcinv/scenario_sim.hpp"

namespace testutil {

using lcinv::UnitQuaternion;
using lcinv::Vec3;

inline Vec3 random_unit(std::mt19937_64& g) {
    std::normal_distribution<double> n;
    Vec3 v;
    do v = Vec3(n(g), n(g), n(g));
    while (v.norm() < 1e-6);
    return v.normalized();
}

inline UnitQuaternion random_quat(std::mt19937_64& g) {
    std::normal_distribution<double> n;
    return UnitQuaternion(n(g), n(g), n(g), n(g));
}

inline double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

// A handful of small dataset-1 style tracklets, generated once.
inline const std::vector<lcinv::sim::Tracklet>& dataset1_fixture(bool xz_symmetric = false) {
    static const auto make = [](bool sym) {
        const double t0 = lcinv::sim::utc_seconds(2022, 1, 10);
        auto cfg = lcinv::sim::dataset1_config(t0, t0 + 2 * 86400, 5);
        cfg.tracklets_per_window = 2;
        cfg.max_windows = 2;
        const auto obj = sym ? lcinv::facet::make_cube_xz_symmetric() : lcinv::facet::make_cube();
        return lcinv::sim::generate_dataset(cfg, obj);
    };
    static const auto plain = make(false);
    static const auto sym = make(true);
    return xz_symmetric ? sym : plain;
}

}  // namespace testutil

namespace testutil {

// Even-odd ray casting.
inline bool point_in_polygon(const std::vector<Eigen::Vector2d>& poly, const Eigen::Vector2d& p) {
    bool inside = false;
    for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
        const auto& a = poly[i];
        const auto& b = poly[j];
        if ((a.y() > p.y()) != (b.y() > p.y()) && p.x() < (b.x() - a.x()) * (p.y() - a.y()) / (b.y() - a.y()) + a.x())
            inside = !inside;
    }
    return inside;
}

// Monte Carlo area of polygon intersect disc over the bounding box of their
// overlap. Jittered stratified: one uniform sample per cell of an m x m grid,
// m = floor(sqrt(samples)).
inline double mc_polygon_disc_area(const std::vector<Eigen::Vector2d>& poly, const Eigen::Vector2d& c, double r,
                                   int samples, std::uint64_t seed) {
    Eigen::Vector2d lo = poly[0], hi = poly[0];
    for (const auto& p : poly) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    lo = lo.cwiseMax(c - Eigen::Vector2d(r, r));
    hi = hi.cwiseMin(c + Eigen::Vector2d(r, r));
    if ((hi - lo).minCoeff() <= 0) return 0.0;
    std::mt19937_64 g(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const int m = int(std::sqrt(double(samples)));
    const Eigen::Vector2d cell = (hi - lo) / m;
    long hits = 0;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            const Eigen::Vector2d p = lo + Eigen::Vector2d((i + u(g)) * cell.x(), (j + u(g)) * cell.y());
            if ((p - c).squaredNorm() <= r * r && point_in_polygon(poly, p)) ++hits;
        }
    return (hi - lo).prod() * double(hits) / (double(m) * m);
}

// Random star-shaped (hence simple) polygon around the origin, CCW.
inline std::vector<Eigen::Vector2d> random_star_polygon(std::mt19937_64& g, int vertices, double r_min, double r_max) {
    std::uniform_real_distribution<double> ur(r_min, r_max), jitter(-0.3, 0.3);
    std::vector<Eigen::Vector2d> out;
    for (int k = 0; k < vertices; ++k) {
        const double a = 2.0 * lcinv::kPi * (k + 0.5 + jitter(g)) / vertices;
        const double r = ur(g);
        out.emplace_back(r * std::cos(a), r * std::sin(a));
    }
    return out;
}

}  // namespace testutil
