#pragma once

// Convex facet reflection models.
//
// A FacetObject is N planar faces, each with a body-frame unit normal and a
// K-channel "average colour" (reflectance x area per material channel). The
// spectrum seen from direction v_B under illumination s_B is the Lambertian
// facet sum
//
//     S(v, s) = sum_i max(0, v.n_i) max(0, s.n_i) c_i
//
// Radiometric constants are omitted; spectra are dimensionless.

#include <Eigen/Dense>

#include <span>
#include <vector>

#include "lcinv/core_math.hpp"

namespace lcinv::facet {

using Spectrum = Eigen::VectorXd;
using Vec2 = Eigen::Vector2d;

struct Facet {
    Vec3 normal;
    Eigen::VectorXd colour;
    /// Body-frame polygon, counter-clockwise about `normal`. Optional; the
    /// FOV-limited model needs it.
    std::vector<Vec3> vertices;
};

class FacetObject {
public:
    /// Validates facets (N >= 4, unit normals, non-negative colours of equal
    /// length, planar CCW vertices) and that every symmetry is orthogonal and
    /// maps the facet set onto itself. The identity is added if absent.
    FacetObject(std::vector<Facet> facets, std::vector<Mat3> symmetries = {});

    int channels() const { return static_cast<int>(colours_.rows()); }
    int facet_count() const { return static_cast<int>(facets_.size()); }
    const std::vector<Facet>& facets() const { return facets_; }
    const std::vector<Mat3>& symmetry_group() const { return symmetries_; }
    bool has_vertices() const;
    /// Largest vertex distance from the body origin (0 without vertices).
    double radius() const;

    /// 3 x N normals and K x N colours, for vectorized evaluation.
    const Eigen::Matrix3Xd& normal_matrix() const { return normals_; }
    const Eigen::MatrixXd& colour_matrix() const { return colours_; }

private:
    std::vector<Facet> facets_;
    std::vector<Mat3> symmetries_;
    Eigen::Matrix3Xd normals_;
    Eigen::MatrixXd colours_;
};

Spectrum lambert_spectrum(const FacetObject& obj, const Vec3& v_B, const Vec3& s_B);

/// Allocation-free variant for inner loops; `out` must have obj.channels() rows.
void lambert_spectrum_into(const FacetObject& obj, const Vec3& v_B, const Vec3& s_B,
                           Eigen::Ref<Eigen::VectorXd> out);

struct SpectrumJacobian {
    Spectrum value;
    Eigen::MatrixXd d_view;  // K x 3, dS/dv_B
    Eigen::MatrixXd d_sun;   // K x 3, dS/ds_B
};

/// Spectrum and its derivatives w.r.t. the (unconstrained) direction vectors.
/// At the max(0, .) kink the subgradient 0 is used.
SpectrumJacobian lambert_spectrum_jacobian(const FacetObject& obj, const Vec3& v_B, const Vec3& s_B);

/// Exact area of (simple polygon) intersect (disc). Throws ArgumentError for
/// fewer than three vertices or a self-intersecting polygon.
double polygon_circle_intersection_area(std::span<const Vec2> polygon, const Vec2& center, double radius);

/// Clipped view factor of one facet: the area of its orthographic projection
/// along v_B intersected with the disc of radius `disc_radius` centred on the
/// projected body origin, divided by the facet area. Equals max(0, v.n) when
/// the disc contains the projection.
double fov_view_factor(const Facet& facet, const Vec3& v_B, double disc_radius);

/// FOV-limited spectrum: the Lambert view factor is replaced by
/// fov_view_factor with disc radius fov_halfangle * distance (small angle).
Spectrum fov_spectrum(const FacetObject& obj, const Vec3& v_B, const Vec3& s_B, double fov_halfangle,
                      double distance);

/// True iff S(v, s) == S(s, v) within 1e-12 for the Lambert model.
bool swap_check(const FacetObject& obj, const Vec3& v_B, const Vec3& s_B);

// Fixtures.

/// Unit cube, faces +x,-x,+y,-y,+z,-z each a distinct one-hot material (K = 6).
FacetObject make_cube();
/// Unit cube whose +y and -y faces share a material (K = 5); the symmetry
/// group holds the reflection about the body xz plane.
FacetObject make_cube_xz_symmetric();
/// Reflection about the body xz plane, diag(1, -1, 1).
Mat3 xz_reflection();
/// Faceted capsule along +x (conical nose, cylindrical trunk, flat ends)
/// with four materials, symmetric about the xz plane.
FacetObject make_capsule(int segments = 16);

}  // namespace lcinv::facet
