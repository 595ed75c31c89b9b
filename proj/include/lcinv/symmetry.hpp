#pragma once

// Observational ambiguity of Lambertian lightcurves.
//
// In the H frame the observation reduces to the phase angle, and four
// orthogonal maps leave the pair {s_H, v_H} invariant (possibly swapped):
//
//   I    = diag(1,  1,  1)
//   T_H1 = diag(1, -1,  1)   reflection through the mediatrix plane (swaps v, s)
//   T_H2 = diag(1,  1, -1)   reflection through the sv plane
//   T_H3 = diag(1, -1, -1)   half turn about h (swaps v, s)
//
// Combined with the body symmetries T_B, every attitude history
//   R_BI^S(t) = R_IH(t)^T T_H R_IH(t) R_BI(t) T_B,   det(T_H) det(T_B) = 1
// replays the same spectra.

#include <string>
#include <vector>

#include "lcinv/core_math.hpp"
#include "lcinv/facet_model.hpp"

namespace lcinv::sym {

enum class HLabel { I, TH1, TH2, TH3 };
const char* label_name(HLabel l);

struct HSymmetry {
    HLabel label;
    Mat3 matrix;  // H-frame coordinates
};

/// The four elements in label order I, T_H1, T_H2, T_H3.
std::vector<HSymmetry> h_group();
const HSymmetry& h_element(HLabel l);

struct SymmetryLabeledHistory {
    AttitudeHistory history;
    HLabel t_h;
    int t_b;  // index into FacetObject::symmetry_group()
};

/// All admissible (T_H, T_B) pairings applied to `history`. Duplicates
/// (mean geodesic distance < 1e-9 rad) are dropped, keeping the first in
/// (T_H, T_B) enumeration order, so element 0 is always the input.
/// Throws DegenerateGeometryError naming the first degenerate sample.
std::vector<SymmetryLabeledHistory> symmetric_histories(const AttitudeHistory& history,
                                                        const std::vector<Vec3>& v_I,
                                                        const std::vector<Vec3>& s_I,
                                                        const facet::FacetObject& obj);

struct SymmetricOmega {
    HLabel t_h;
    std::vector<Vec3> omega_bi;  // per sample, inertial frame
};

/// Angular velocity of each admissible symmetric history,
///   w^S = w_HI + det(T_H) R_IH^T T_H R_IH (w_BI - w_HI),
/// with w_HI by central differences of half-width min(1 s, spacing)/2.
/// The det(T_H) factor is the pseudovector sign for the two reflections.
/// At most four elements; a T_H is admissible iff some T_B has matching det.
std::vector<SymmetricOmega> symmetric_omegas(const std::vector<double>& times, const std::vector<Vec3>& omega_bi,
                                             const GeometryFn& geometry, const facet::FacetObject& obj);

struct OmegaTargets {
    Vec3 w_BH;
    Vec3 w_BH_S;    // w_BH with |y|, |z|
    Vec3 abs_w_BH;  // element-wise
    Vec3 abs_w_BI;  // element-wise
};

/// w_BH = R_IH (w_BI - w_HI) at one instant.
OmegaTargets omega_bh_targets(const Vec3& omega_bi, const Mat3& r_ih, const Vec3& omega_hi);

/// View and sun directions in the body for H-frame Euler angles:
///   v_B = Rz(theta) Ry(-phi) Rx(psi) Rz(+alpha/2) x
///   s_B = Rz(theta) Ry(-phi) Rx(psi) Rz(-alpha/2) x
std::pair<Vec3, Vec3> euler_view_sun(double theta_h, double phi_h, double psi_h, double alpha);

/// Sum over channels of squared error between `observed` and the model.
double single_spectrum_cost(const facet::FacetObject& obj, const facet::Spectrum& observed, const Vec3& v_B,
                            const Vec3& s_B);

struct CostSurface {
    std::vector<double> theta;  // columns
    std::vector<double> phi;    // rows
    Eigen::MatrixXd cost;       // phi.size() x theta.size(), min over psi
    Eigen::MatrixXd best_psi;
};

/// Brute-force min over `psi_samples` equally spaced roll angles in [0, 2 pi).
CostSurface cost_surface_scan(const facet::FacetObject& obj, const facet::Spectrum& observed, double alpha,
                              const std::vector<double>& theta, const std::vector<double>& phi,
                              int psi_samples = 64, int workers = 1);

/// `count` equally spaced values from lo to hi inclusive (count >= 2).
std::vector<double> linspace(double lo, double hi, int count);

/// CSV: first row "phi\theta" then theta values, then one row per phi.
std::string cost_surface_csv(const CostSurface& s);

}  // namespace lcinv::sym
