#pragma once

// Accuracy metrics against the symmetry set of the ground truth.

#include <string>
#include <vector>

#include "lcinv/core_math.hpp"
#include "lcinv/facet_model.hpp"
#include "lcinv/scenario_sim.hpp"
#include "lcinv/symmetry.hpp"

namespace lcinv::eval {

/// sqrt(mean_i angle(R_est,i R_ref,i^T)^2), degrees. Time grids must match
/// within 1e-9 s.
double rms_theta(const AttitudeHistory& estimate, const AttitudeHistory& reference);

struct EvalRow {
    sym::HLabel t_h;
    int t_b;
    double rms_deg;
};

struct EvalReport {
    std::vector<EvalRow> rows;  // symmetry-set order, identity pair first
    std::size_t best = 0;
    double replay_residual = 0;  // spectrum RMS of the estimate
    bool converged = true;
    std::string method;

    const EvalRow& best_row() const { return rows.at(best); }
};

EvalReport evaluate_against_symmetry_set(const AttitudeHistory& estimate, const AttitudeHistory& truth,
                                         const std::vector<Vec3>& v_I, const std::vector<Vec3>& s_I,
                                         const facet::FacetObject& obj);

/// Same, using the tracklet's geometry and truth block (DataError without it);
/// fills the replay residual.
EvalReport evaluate_tracklet(const AttitudeHistory& estimate, const sim::Tracklet& tracklet,
                             const facet::FacetObject& obj);

/// RMS over samples and channels of observed minus replayed spectra.
double replay_residual(const AttitudeHistory& estimate, const sim::Tracklet& tracklet,
                       const facet::FacetObject& obj);

/// ZYX (yaw, pitch, roll) in radians of R_BI; roll = 0 at gimbal lock.
Vec3 euler_zyx(const Mat3& r);
/// CSV with columns t, yaw_deg, pitch_deg, roll_deg.
std::string euler_csv(const AttitudeHistory& h);

/// CSV with columns t, obs_0.., model_0.. for plotting replays.
std::string replay_csv(const AttitudeHistory& estimate, const sim::Tracklet& tracklet,
                       const facet::FacetObject& obj);

/// Aligned text table, degrees to 2 decimals.
std::string report_table(const EvalReport& r);

}  // namespace lcinv::eval
