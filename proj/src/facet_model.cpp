#include "lcinv/facet_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace lcinv::facet {

namespace {

constexpr double kSymmetryTol = 1e-9;

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

// Newell normal (area-weighted) of a 3-D polygon.
Vec3 newell(const std::vector<Vec3>& poly) {
    Vec3 n = Vec3::Zero();
    for (std::size_t k = 0; k < poly.size(); ++k) n += poly[k].cross(poly[(k + 1) % poly.size()]);
    return 0.5 * n;
}

void validate_facet(const Facet& f, std::size_t idx, Eigen::Index channels) {
    const std::string where = "facet " + std::to_string(idx) + ": ";
    if (std::abs(f.normal.norm() - 1.0) > 1e-9) throw ArgumentError(where + "normal is not unit");
    if (f.colour.size() != channels) throw ArgumentError(where + "colour length differs from channel count");
    if ((f.colour.array() < 0).any()) throw ArgumentError(where + "negative colour entry");
    if (f.vertices.empty()) return;
    if (f.vertices.size() < 3) throw ArgumentError(where + "needs at least 3 vertices");
    const double d0 = f.normal.dot(f.vertices.front());
    for (const auto& p : f.vertices) {
        if (std::abs(f.normal.dot(p) - d0) > 1e-9) throw ArgumentError(where + "vertices are not coplanar");
    }
    if (newell(f.vertices).dot(f.normal) <= 0) {
        throw ArgumentError(where + "vertices are not counter-clockwise about the normal");
    }
}

// Signed area of disc(0, r) intersect triangle(0, a, b).
double triangle_disc_area(const Vec2& a, const Vec2& b, double r) {
    const Vec2 d = b - a;
    const double qa = d.squaredNorm();
    if (qa < 1e-300) return 0.0;
    const double qb = 2.0 * a.dot(d);
    const double qc = a.squaredNorm() - r * r;
    double cuts[4] = {0.0, 0.0, 0.0, 1.0};
    int ncut = 1;
    const double disc = qb * qb - 4.0 * qa * qc;
    if (disc > 0) {
        const double sq = std::sqrt(disc);
        const double t1 = (-qb - sq) / (2.0 * qa);
        const double t2 = (-qb + sq) / (2.0 * qa);
        if (t1 > 0 && t1 < 1) cuts[ncut++] = t1;
        if (t2 > 0 && t2 < 1) cuts[ncut++] = t2;
    }
    cuts[ncut++] = 1.0;
    double area = 0.0;
    for (int k = 0; k + 1 < ncut; ++k) {
        const Vec2 p = a + cuts[k] * d;
        const Vec2 q = a + cuts[k + 1] * d;
        const Vec2 mid = 0.5 * (p + q);
        if (mid.squaredNorm() <= r * r) {
            area += 0.5 * cross2(p, q);
        } else {
            area += 0.5 * r * r * std::atan2(cross2(p, q), p.dot(q));
        }
    }
    return area;
}

bool segments_intersect(const Vec2& p1, const Vec2& p2, const Vec2& q1, const Vec2& q2) {
    auto orient = [](const Vec2& a, const Vec2& b, const Vec2& c) { return cross2(b - a, c - a); };
    auto on_segment = [](const Vec2& a, const Vec2& b, const Vec2& c) {
        return std::min(a.x(), b.x()) <= c.x() && c.x() <= std::max(a.x(), b.x()) &&
               std::min(a.y(), b.y()) <= c.y() && c.y() <= std::max(a.y(), b.y());
    };
    const double d1 = orient(q1, q2, p1), d2 = orient(q1, q2, p2);
    const double d3 = orient(p1, p2, q1), d4 = orient(p1, p2, q2);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) return true;
    if (d1 == 0 && on_segment(q1, q2, p1)) return true;
    if (d2 == 0 && on_segment(q1, q2, p2)) return true;
    if (d3 == 0 && on_segment(p1, p2, q1)) return true;
    if (d4 == 0 && on_segment(p1, p2, q2)) return true;
    return false;
}

// Outward-facing facet from a polygon around a convex body containing the origin.
Facet facet_from_polygon(std::vector<Vec3> poly, const Eigen::VectorXd& material, double reflectance = 1.0) {
    Vec3 n = newell(poly);
    const double area = n.norm();
    n /= area;
    Vec3 centroid = Vec3::Zero();
    for (const auto& p : poly) centroid += p;
    centroid /= double(poly.size());
    if (n.dot(centroid) < 0) {
        std::reverse(poly.begin(), poly.end());
        n = -n;
    }
    return {n, material * (reflectance * area), std::move(poly)};
}

Eigen::VectorXd one_hot(int k, int channels) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(channels);
    c[k] = 1.0;
    return c;
}

std::vector<Facet> cube_faces(const int materials[6], int channels) {
    std::vector<Facet> faces;
    const Vec3 axes[3] = {Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ()};
    for (int f = 0; f < 6; ++f) {
        const int a = f / 2;
        const double sign = (f % 2 == 0) ? 1.0 : -1.0;
        const Vec3 n = sign * axes[a];
        const Vec3 u = axes[(a + 1) % 3];
        const Vec3 w = axes[(a + 2) % 3];
        const Vec3 c = 0.5 * n;
        std::vector<Vec3> poly = {c - 0.5 * u - 0.5 * w, c + 0.5 * u - 0.5 * w, c + 0.5 * u + 0.5 * w,
                                  c - 0.5 * u + 0.5 * w};
        faces.push_back(facet_from_polygon(std::move(poly), one_hot(materials[f], channels)));
        faces.back().normal = n;  // exact axis normal
    }
    return faces;
}

}  // namespace

FacetObject::FacetObject(std::vector<Facet> facets, std::vector<Mat3> symmetries)
    : facets_(std::move(facets)), symmetries_(std::move(symmetries)) {
    if (facets_.size() < 4) throw ArgumentError("FacetObject: need at least 4 facets");
    const Eigen::Index k = facets_.front().colour.size();
    if (k < 1) throw ArgumentError("FacetObject: colour vectors must be non-empty");
    normals_.resize(3, Eigen::Index(facets_.size()));
    colours_.resize(k, Eigen::Index(facets_.size()));
    for (std::size_t i = 0; i < facets_.size(); ++i) {
        validate_facet(facets_[i], i, k);
        normals_.col(Eigen::Index(i)) = facets_[i].normal;
        colours_.col(Eigen::Index(i)) = facets_[i].colour;
    }
    const bool has_identity = std::any_of(symmetries_.begin(), symmetries_.end(), [](const Mat3& m) {
        return (m - Mat3::Identity()).cwiseAbs().maxCoeff() < kSymmetryTol;
    });
    if (!has_identity) symmetries_.insert(symmetries_.begin(), Mat3::Identity());
    for (std::size_t s = 0; s < symmetries_.size(); ++s) {
        const Mat3& t = symmetries_[s];
        if ((t.transpose() * t - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-9) {
            throw ArgumentError("FacetObject: symmetry " + std::to_string(s) + " is not orthogonal");
        }
        for (std::size_t i = 0; i < facets_.size(); ++i) {
            const Vec3 mapped = t * facets_[i].normal;
            const bool found = std::any_of(facets_.begin(), facets_.end(), [&](const Facet& f) {
                return (f.normal - mapped).cwiseAbs().maxCoeff() < kSymmetryTol &&
                       (f.colour - facets_[i].colour).cwiseAbs().maxCoeff() < kSymmetryTol;
            });
            if (!found) {
                throw ArgumentError("FacetObject: symmetry " + std::to_string(s) + " does not map facet " +
                                    std::to_string(i) + " onto the facet set");
            }
        }
    }
}

bool FacetObject::has_vertices() const {
    return std::all_of(facets_.begin(), facets_.end(), [](const Facet& f) { return !f.vertices.empty(); });
}

double FacetObject::radius() const {
    double r = 0.0;
    for (const auto& f : facets_)
        for (const auto& p : f.vertices) r = std::max(r, p.norm());
    return r;
}

void lambert_spectrum_into(const FacetObject& obj, const Vec3& v_B, const Vec3& s_B,
                           Eigen::Ref<Eigen::VectorXd> out) {
    const auto& normals = obj.normal_matrix();
    const auto& colours = obj.colour_matrix();
    out.setZero();
    for (Eigen::Index i = 0; i < normals.cols(); ++i) {
        const double a = std::max(0.0, v_B.dot(normals.col(i)));
        const double b = std::max(0.0, s_B.dot(normals.col(i)));
        const double w = a * b;
        if (w > 0) out.noalias() += w * colours.col(i);
    }
}

Spectrum lambert_spectrum(const FacetObject& obj, const Vec3& v_B, const Vec3& s_B) {
    Spectrum out(obj.channels());
    lambert_spectrum_into(obj, v_B, s_B, out);
    return out;
}

SpectrumJacobian lambert_spectrum_jacobian(const FacetObject& obj, const Vec3& v_B, const Vec3& s_B) {
    const auto& normals = obj.normal_matrix();
    const auto& colours = obj.colour_matrix();
    const Eigen::Index k = colours.rows();
    SpectrumJacobian j{Spectrum::Zero(k), Eigen::MatrixXd::Zero(k, 3), Eigen::MatrixXd::Zero(k, 3)};
    for (Eigen::Index i = 0; i < normals.cols(); ++i) {
        const Vec3 n = normals.col(i);
        const double a = v_B.dot(n);
        const double b = s_B.dot(n);
        if (a <= 0 || b <= 0) continue;
        j.value.noalias() += (a * b) * colours.col(i);
        j.d_view.noalias() += b * colours.col(i) * n.transpose();
        j.d_sun.noalias() += a * colours.col(i) * n.transpose();
    }
    return j;
}

double polygon_circle_intersection_area(std::span<const Vec2> polygon, const Vec2& center, double radius) {
    const std::size_t n = polygon.size();
    if (n < 3) throw ArgumentError("polygon_circle_intersection_area: need at least 3 vertices");
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (j == i + 1 || (i == 0 && j == n - 1)) continue;  // adjacent edges share a vertex
            if (segments_intersect(polygon[i], polygon[(i + 1) % n], polygon[j], polygon[(j + 1) % n])) {
                throw ArgumentError("polygon_circle_intersection_area: polygon is self-intersecting");
            }
        }
    }
    if (!(radius > 0)) return 0.0;
    double area = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        area += triangle_disc_area(polygon[i] - center, polygon[(i + 1) % n] - center, radius);
    }
    return std::abs(area);
}

double fov_view_factor(const Facet& facet, const Vec3& v_B, double disc_radius) {
    if (facet.vertices.size() < 3) throw ArgumentError("fov_view_factor: facet has no vertices");
    const Vec3 v = v_B.normalized();
    if (v.dot(facet.normal) <= 0) return 0.0;
    // Image-plane basis with e1 x e2 = v, so CCW facets seen from v stay CCW.
    const Vec3 helper = std::abs(v.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
    const Vec3 e1 = v.cross(helper).normalized();
    const Vec3 e2 = v.cross(e1);
    std::vector<Vec2> projected;
    projected.reserve(facet.vertices.size());
    for (const auto& p : facet.vertices) projected.emplace_back(p.dot(e1), p.dot(e2));
    const double facet_area = newell(facet.vertices).norm();
    return polygon_circle_intersection_area(projected, Vec2::Zero(), disc_radius) / facet_area;
}

Spectrum fov_spectrum(const FacetObject& obj, const Vec3& v_B, const Vec3& s_B, double fov_halfangle,
                      double distance) {
    if (!obj.has_vertices()) throw ArgumentError("fov_spectrum: every facet needs vertices");
    if (!(distance > obj.radius())) throw ArgumentError("fov_spectrum: distance must exceed the object radius");
    const double disc = fov_halfangle * distance;
    Spectrum out = Spectrum::Zero(obj.channels());
    for (const auto& f : obj.facets()) {
        const double b = std::max(0.0, s_B.dot(f.normal));
        if (b <= 0) continue;
        const double view = fov_view_factor(f, v_B, disc);
        if (view > 0) out.noalias() += (view * b) * f.colour;
    }
    return out;
}

bool swap_check(const FacetObject& obj, const Vec3& v_B, const Vec3& s_B) {
    const Spectrum a = lambert_spectrum(obj, v_B, s_B);
    const Spectrum b = lambert_spectrum(obj, s_B, v_B);
    return (a - b).cwiseAbs().maxCoeff() <= 1e-12;
}

Mat3 xz_reflection() { return Eigen::Vector3d(1.0, -1.0, 1.0).asDiagonal(); }

FacetObject make_cube() {
    const int materials[6] = {0, 1, 2, 3, 4, 5};
    return FacetObject(cube_faces(materials, 6));
}

FacetObject make_cube_xz_symmetric() {
    const int materials[6] = {0, 1, 2, 2, 3, 4};
    return FacetObject(cube_faces(materials, 5), {xz_reflection()});
}

FacetObject make_capsule(int segments) {
    if (segments < 4 || segments % 2 != 0) throw ArgumentError("make_capsule: segments must be even and >= 4");
    constexpr int kChannels = 4;
    const double x_base = -1.0, x_shoulder = 0.5, x_nose = 1.5;
    const double r_trunk = 1.0, r_nose = 0.5;
    auto ring = [&](double x, double r, double phi) { return Vec3(x, r * std::cos(phi), r * std::sin(phi)); };
    const double half = kPi / segments;
    std::vector<Facet> facets;
    for (int k = 0; k < segments; ++k) {
        const double phi = 2.0 * kPi * k / segments;
        const double a = phi - half, b = phi + half;
        // Upper (z > 0) and lower halves of the trunk use different materials;
        // the split is invariant under y -> -y.
        const int trunk_material = std::sin(phi) > 1e-12 ? 0 : 1;
        facets.push_back(facet_from_polygon(
            {ring(x_base, r_trunk, a), ring(x_base, r_trunk, b), ring(x_shoulder, r_trunk, b),
             ring(x_shoulder, r_trunk, a)},
            one_hot(trunk_material, kChannels), 0.8));
        facets.push_back(facet_from_polygon(
            {ring(x_shoulder, r_trunk, a), ring(x_shoulder, r_trunk, b), ring(x_nose, r_nose, b),
             ring(x_nose, r_nose, a)},
            one_hot(2, kChannels), 0.6));
    }
    std::vector<Vec3> base, top;
    for (int k = 0; k < segments; ++k) {
        const double phi = 2.0 * kPi * k / segments + half;
        base.push_back(ring(x_base, r_trunk, phi));
        top.push_back(ring(x_nose, r_nose, phi));
    }
    facets.push_back(facet_from_polygon(std::move(base), one_hot(3, kChannels), 0.5));
    facets.push_back(facet_from_polygon(std::move(top), one_hot(3, kChannels), 0.9));
    // Symmetry check compares normals at 1e-9; snap the trig round-off.
    for (auto& f : facets) {
        for (int c = 0; c < 3; ++c)
            if (std::abs(f.normal[c]) < 1e-15) f.normal[c] = 0.0;
        for (auto& p : f.vertices)
            for (int c = 0; c < 3; ++c)
                if (std::abs(p[c]) < 1e-15) p[c] = 0.0;
    }
    return FacetObject(std::move(facets), {xz_reflection()});
}

}  // namespace lcinv::facet
