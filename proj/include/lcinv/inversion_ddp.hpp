#pragma once

// Trajectory-optimization inversion: iLQR over x = (q, w_BI) with angular
// acceleration controls, grown one sample at a time by a best-first search
// over initial attitudes.
//
// Path loss  l_i = ||S_obs_i - S(R(q_i)^T v_I, R(q_i)^T s_I)||^2 + eta_alpha ||u_i||^2
// Transition q_{i+1} = exp(w_i dt) q_i,  w_{i+1} = w_i + dt u_i
//
// A node of length n holds n states and n - 1 controls; the measurement term
// applies to every state, the control term to every control. The initial
// state is a decision variable too.

#include <cstdint>
#include <optional>
#include <vector>

#include "lcinv/core_math.hpp"
#include "lcinv/facet_model.hpp"
#include "lcinv/scenario_sim.hpp"

namespace lcinv::ddp {

struct DdpState {
    UnitQuaternion q;
    Vec3 w = Vec3::Zero();  // BI, rad/s
};

struct TrajectoryNode {
    std::vector<DdpState> states;
    std::vector<Vec3> controls;  // rad/s^2, states.size() - 1 of them
    double cost = 0;             // V
    double heuristic = 0;        // h at the last priority evaluation
    int expansions = 0;
    std::uint64_t id = 0;
    bool improved = true;        // false when the last optimize could not make progress

    std::size_t size() const { return states.size(); }
};

DdpState step(const DdpState& x, const Vec3& u, double dt);

/// Loss of sample i: measurement term plus eta_alpha ||u||^2.
double path_loss(const DdpState& x, const Vec3& u, const sim::Tracklet& tracklet, std::size_t i,
                 const facet::FacetObject& obj, double eta_alpha);

struct NodeLosses {
    double measurement = 0;
    double control = 0;
    double total() const { return measurement + control; }
};

/// Recomputes V for a node against the tracklet prefix.
NodeLosses node_losses(const TrajectoryNode& node, const sim::Tracklet& tracklet, const facet::FacetObject& obj,
                       double eta_alpha);

struct DdpOptions {
    double eta_alpha = 1.0;
    int max_iterations = 10;
    double rel_tol = 1e-9;
    double lambda_init = 1e-6;
    double lambda_min = 1e-8;
    double lambda_max = 1e8;
};

/// Linearized transition at (x, u) in tangent coordinates
/// dx = (dtheta, dw) with q = exp(dtheta) q_bar.
struct Linearization {
    Eigen::Matrix<double, 6, 6> a;
    Eigen::Matrix<double, 6, 3> b;
};
Linearization linearize_step(const DdpState& x, double dt);

/// iLQR with Levenberg regularization on the control Hessian and a
/// backtracking forward pass. V never increases.
TrajectoryNode ddp_optimize(TrajectoryNode node, const sim::Tracklet& tracklet, const facet::FacetObject& obj,
                            const DdpOptions& opt);

/// Appends x_{n+1} = x_n with a zero control and re-optimizes.
TrajectoryNode expand(TrajectoryNode node, const sim::Tracklet& tracklet, const facet::FacetObject& obj,
                      const DdpOptions& opt);

struct HeuristicParams {
    double a = 4.0;
    int n0 = 5;
    long k0 = 1000;
    double rho = 1.001;
};

/// h = V / (a n) max(0, n_max - n - n0) rho^max(0, k - k0)
double heuristic(double cost, int n, int n_max, long k, const HeuristicParams& p = {});

struct BestFirstOptions {
    int initial_count = 512;
    std::uint64_t seed = 11;
    double eta = 1.0;
    std::optional<double> eta_alpha;  // default eta_alpha_scale * eta * dt
    double eta_alpha_scale = 10.0;
    HeuristicParams heuristic;
    long max_pops = 1000000;
    DdpOptions ddp;
    /// Explicit initial attitudes; overrides initial_count/seed when non-empty.
    std::vector<UnitQuaternion> initial_attitudes;
};

struct BestFirstResult {
    TrajectoryNode node;
    std::optional<AttitudeHistory> history;  // set when the node reached full length
    NodeLosses losses;
    bool success = false;
    long pops = 0;
    std::vector<long> expansions_by_length;  // index = resulting node length
};

BestFirstResult best_first_invert(const sim::Tracklet& tracklet, const facet::FacetObject& obj,
                                  const BestFirstOptions& opt = {});

}  // namespace lcinv::ddp
