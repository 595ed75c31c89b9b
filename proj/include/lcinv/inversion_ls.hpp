#pragma once

// Regularized least-squares attitude-history inversion.
//
//   L(q) = E(q) + eta * J_alpha(q)
//   E       = sum_i || S_obs_i - S(R(q_i)^T v_I(t_i), R(q_i)^T s_I(t_i)) ||^2
//   J_alpha = (2 / dt^2) sum_i || q_{i+2} q_{i+1}^c - q_{i+1} q_i^c ||^2
//
// Decision variables are the raw 4N quaternion coordinates; every quaternion
// is normalized before evaluation and after each accepted step.

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "lcinv/core_math.hpp"
#include "lcinv/facet_model.hpp"
#include "lcinv/scenario_sim.hpp"

namespace lcinv::ls {

// ---- generic limited-memory quasi-Newton ---------------------------------

/// f(x, grad) returns the value and fills *grad when non-null.
using Objective = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd*)>;
/// Maps a trial point back onto the feasible set (in place).
using Retraction = std::function<void(Eigen::VectorXd&)>;

struct LbfgsOptions {
    int max_iterations = 2000;
    double rel_tol = 1e-10;  // relative decrease over `window` iterations
    int window = 5;
    int memory = 10;
    double abs_tol = 1e-28;  // stop once f falls below this
};

struct LbfgsResult {
    Eigen::VectorXd x;
    double f = 0;
    int iterations = 0;
    bool converged = false;
    std::vector<double> trace;  // f after each accepted iteration, trace[0] = f(x0)
};

/// Backtracking-Armijo L-BFGS. Accepted steps never increase f.
LbfgsResult minimize_lbfgs(const Objective& f, Eigen::VectorXd x0, const LbfgsOptions& opt = {},
                           const Retraction& retract = {});

// ---- losses ----------------------------------------------------------------

double measurement_loss(const AttitudeHistory& history, const sim::Tracklet& tracklet, const facet::FacetObject& obj);

/// E over samples [0, quats.size()) with the gradient w.r.t. each (unit)
/// quaternion's 4 coordinates, tangent to the unit sphere.
double measurement_loss_grad(const std::vector<Vec4>& quats, const sim::Tracklet& tracklet,
                             const facet::FacetObject& obj, Eigen::VectorXd* grad);

/// J_alpha on raw 4-vectors (no normalization), gradient w.r.t. the raw
/// coordinates. Requires >= 3 samples.
double j_alpha(const std::vector<Vec4>& quats, double dt, Eigen::VectorXd* grad = nullptr);
/// Checks uniform spacing (ArgumentError otherwise).
double j_alpha(const AttitudeHistory& history);

// ---- fixed-axis initial guess -------------------------------------------------

struct FixedAxisOptions {
    int attitude_samples = 128;
    int axis_samples = 64;
    std::uint64_t seed = 7;
    /// Overrides attitude_samples when non-empty.
    std::vector<UnitQuaternion> attitudes;
    int refine_top = 128; // seeds refined on one period; 0 disables refinement
    int extend_top = 4;   // of those, how many are extended to the full length
    /// Score grid seeds on the first period only (coarse axes drift over
    /// longer spans); otherwise on the whole tracklet.
    bool score_one_period = true;
    int workers = 1;
};

struct SeedCost {
    std::size_t index;  // enumeration order: period, attitude, axis
    double period;
    UnitQuaternion q0;
    Vec3 omega;
    double cost;
};

struct FixedAxisGuess {
    AttitudeHistory history;
    UnitQuaternion q0;
    Vec3 omega;
    double period;
    double grid_best_cost;   // before refinement
    double cost;             // E of `history`
    std::vector<SeedCost> ranked;  // grid seeds, ascending cost, index tie-break
};

/// Unit directions on a Fibonacci spiral.
std::vector<Vec3> fibonacci_sphere(int count);

/// Grid search over (P or 2P for each candidate, attitude, axis), then
/// refinement of the top seeds over (initial attitude, angular velocity)
/// under the fixed-axis constraint on a one-period segment. The best of
/// those are re-fitted over doubling spans up to the full tracklet.
FixedAxisGuess fixed_axis_guess(const sim::Tracklet& tracklet, const facet::FacetObject& obj,
                                const std::vector<double>& periods, const FixedAxisOptions& opt = {});

// ---- regularized LS -------------------------------------------------------------

struct LsOptions {
    double eta = 1.0;
    LbfgsOptions lbfgs;
    int workers = 1;
};

struct LsSolution {
    AttitudeHistory history;
    double measurement_loss = 0;  // E
    double j_alpha = 0;
    double total_loss = 0;        // E + eta J_alpha
    bool converged = false;
    int iterations = 0;
    int seed_index = 0;
    std::vector<double> seed_losses;
};

/// Total loss L at a history (same normalization as optimize).
double total_loss(const AttitudeHistory& history, const sim::Tracklet& tracklet, const facet::FacetObject& obj,
                  double eta);

/// Optimizes from every seed; returns the lowest-loss result (index tie-break).
LsSolution optimize(const sim::Tracklet& tracklet, const facet::FacetObject& obj,
                    const std::vector<AttitudeHistory>& seeds, const LsOptions& opt = {});

struct LsPipelineResult {
    FixedAxisGuess guess;
    LsSolution solution;
};

/// Fixed-axis guess for the given periods, then optimize from every element
/// of the guess's symmetry set.
LsPipelineResult invert(const sim::Tracklet& tracklet, const facet::FacetObject& obj,
                        const std::vector<double>& periods, const FixedAxisOptions& guess_opt = {},
                        const LsOptions& opt = {});

}  // namespace lcinv::ls
