#include "lcinv/inversion_ddp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lcinv::ddp {

namespace {

using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Mat63 = Eigen::Matrix<double, 6, 3>;
using Mat36 = Eigen::Matrix<double, 3, 6>;

struct StageExpansion {
    double value;
    Vec6 lx = Vec6::Zero();
    Mat6 lxx = Mat6::Zero();
};

// Measurement term with Gauss-Newton expansion in the attitude tangent.
StageExpansion measurement_expansion(const DdpState& x, const sim::Tracklet& t, std::size_t i,
                                     const facet::FacetObject& obj) {
    const Mat3 r = to_matrix(x.q);
    const Vec3 v_b = r.transpose() * t.v_I[i];
    const Vec3 s_b = r.transpose() * t.s_I[i];
    const auto jac = facet::lambert_spectrum_jacobian(obj, v_b, s_b);
    const Eigen::VectorXd res = t.spectra[i] - jac.value;
    const Eigen::MatrixXd g = jac.d_view * r.transpose() * skew(t.v_I[i]) + jac.d_sun * r.transpose() * skew(t.s_I[i]);
    StageExpansion e;
    e.value = res.squaredNorm();
    e.lx.head<3>() = -2.0 * g.transpose() * res;
    e.lxx.topLeftCorner<3, 3>() = 2.0 * g.transpose() * g;
    return e;
}

double measurement_value(const DdpState& x, const sim::Tracklet& t, std::size_t i, const facet::FacetObject& obj) {
    const UnitQuaternion qc = x.q.conjugate();
    return (t.spectra[i] - facet::lambert_spectrum(obj, rotate(qc, t.v_I[i]), rotate(qc, t.s_I[i]))).squaredNorm();
}

Vec6 state_difference(const DdpState& x, const DdpState& ref) {
    Vec6 d;
    d.head<3>() = to_rotation_vector(x.q * ref.q.conjugate());
    d.tail<3>() = x.w - ref.w;
    return d;
}

DdpState retract(const DdpState& ref, const Vec6& d) {
    return {from_rotation_vector(d.head<3>()) * ref.q, ref.w + d.tail<3>()};
}

double rollout_cost(const TrajectoryNode& n, const sim::Tracklet& t, const facet::FacetObject& obj, double eta) {
    double v = 0;
    for (std::size_t i = 0; i < n.size(); ++i) v += measurement_value(n.states[i], t, i, obj);
    for (const auto& u : n.controls) v += eta * u.squaredNorm();
    return v;
}

double spacing(const sim::Tracklet& t, std::size_t i) { return t.times[i + 1] - t.times[i]; }

}  // namespace

DdpState step(const DdpState& x, const Vec3& u, double dt) {
    if (!(dt > 0)) throw ArgumentError("ddp step: dt must be positive");
    DdpState out;
    const double rate = x.w.norm();
    out.q = rate < 1e-12 ? x.q : from_axis_angle(x.w / rate, dt * rate) * x.q;
    out.w = x.w + dt * u;
    return out;
}

double path_loss(const DdpState& x, const Vec3& u, const sim::Tracklet& t, std::size_t i,
                 const facet::FacetObject& obj, double eta_alpha) {
    if (i >= t.size()) throw ArgumentError("path_loss: sample index out of range");
    return measurement_value(x, t, i, obj) + eta_alpha * u.squaredNorm();
}

NodeLosses node_losses(const TrajectoryNode& n, const sim::Tracklet& t, const facet::FacetObject& obj,
                       double eta_alpha) {
    if (n.size() > t.size()) throw ArgumentError("node_losses: node longer than tracklet");
    NodeLosses l;
    for (std::size_t i = 0; i < n.size(); ++i) l.measurement += measurement_value(n.states[i], t, i, obj);
    for (const auto& u : n.controls) l.control += eta_alpha * u.squaredNorm();
    return l;
}

Linearization linearize_step(const DdpState& x, double dt) {
    const Vec3 phi = x.w * dt;
    Linearization lin;
    lin.a.setIdentity();
    lin.a.topLeftCorner<3, 3>() = to_matrix(from_rotation_vector(phi));
    lin.a.topRightCorner<3, 3>() = so3_left_jacobian(phi) * dt;
    lin.b.setZero();
    lin.b.bottomRows<3>() = dt * Mat3::Identity();
    return lin;
}

TrajectoryNode ddp_optimize(TrajectoryNode node, const sim::Tracklet& t, const facet::FacetObject& obj,
                            const DdpOptions& opt) {
    const std::size_t n = node.size();
    if (n < 1 || n > t.size()) throw ArgumentError("ddp_optimize: node length must be in [1, tracklet length]");
    if (node.controls.size() + 1 != n) throw ArgumentError("ddp_optimize: need n - 1 controls");
    const double eta = opt.eta_alpha;
    // The nominal must satisfy the dynamics; an appended x_{n+1} = x_n does not.
    for (std::size_t i = 0; i + 1 < n; ++i) node.states[i + 1] = step(node.states[i], node.controls[i], spacing(t, i));
    node.cost = rollout_cost(node, t, obj, eta);
    node.improved = false;

    double lambda = opt.lambda_init;
    std::vector<Vec3> k_ff(n > 1 ? n - 1 : 0);
    std::vector<Mat36> k_fb(k_ff.size());
    std::vector<Linearization> lin(k_ff.size());
    std::vector<StageExpansion> stage(n);

    for (int iter = 0; iter < opt.max_iterations; ++iter) {
        for (std::size_t i = 0; i < n; ++i) stage[i] = measurement_expansion(node.states[i], t, i, obj);
        for (std::size_t i = 0; i + 1 < n; ++i) lin[i] = linearize_step(node.states[i], spacing(t, i));

        bool progressed = false;
        while (lambda <= opt.lambda_max) {
            // Backward pass.
            Vec6 vx = stage[n - 1].lx;
            Mat6 vxx = stage[n - 1].lxx;
            bool ok = true;
            for (std::size_t ii = n - 1; ii-- > 0;) {
                const auto& a = lin[ii].a;
                const auto& b = lin[ii].b;
                const Vec3& u = node.controls[ii];
                const Vec6 qx = stage[ii].lx + a.transpose() * vx;
                const Vec3 qu = 2.0 * eta * u + b.transpose() * vx;
                const Mat6 qxx = stage[ii].lxx + a.transpose() * vxx * a;
                Mat3 quu = 2.0 * eta * Mat3::Identity() + b.transpose() * vxx * b;
                const Mat36 qux = b.transpose() * vxx * a;
                const Mat3 quu_reg = quu + lambda * Mat3::Identity();
                Eigen::LLT<Mat3> llt(quu_reg);
                if (llt.info() != Eigen::Success) {
                    ok = false;
                    break;
                }
                k_ff[ii] = -llt.solve(qu);
                k_fb[ii] = -llt.solve(qux);
                const Vec3& kk = k_ff[ii];
                const Mat36& kf = k_fb[ii];
                vx = qx + kf.transpose() * quu * kk + kf.transpose() * qu + qux.transpose() * kk;
                vxx = qxx + kf.transpose() * quu * kf + kf.transpose() * qux + qux.transpose() * kf;
                vxx = 0.5 * (vxx + vxx.transpose());
            }
            Vec6 dx0 = Vec6::Zero();
            if (ok) {
                Eigen::LLT<Mat6> llt(vxx + lambda * Mat6::Identity());
                if (llt.info() != Eigen::Success) ok = false;
                else dx0 = -llt.solve(vx);
            }
            if (!ok) {
                lambda *= 10.0;
                continue;
            }

            // Forward pass with backtracking.
            bool accepted = false;
            for (double alpha = 1.0; alpha > 1e-4; alpha *= 0.5) {
                TrajectoryNode trial = node;
                trial.states[0] = retract(node.states[0], alpha * dx0);
                for (std::size_t i = 0; i + 1 < n; ++i) {
                    const Vec6 dx = state_difference(trial.states[i], node.states[i]);
                    trial.controls[i] = node.controls[i] + alpha * k_ff[i] + k_fb[i] * dx;
                    trial.states[i + 1] = step(trial.states[i], trial.controls[i], spacing(t, i));
                }
                const double v = rollout_cost(trial, t, obj, eta);
                if (std::isfinite(v) && v < node.cost) {
                    const double before = node.cost;
                    trial.cost = v;
                    node = std::move(trial);
                    node.improved = true;
                    accepted = true;
                    progressed = (before - v) > opt.rel_tol * std::max(before, 1e-300);
                    break;
                }
            }
            if (accepted) {
                lambda = std::max(opt.lambda_min, lambda * 0.5);
                break;
            }
            lambda *= 10.0;
        }
        if (!progressed) break;
    }
    return node;
}

TrajectoryNode expand(TrajectoryNode node, const sim::Tracklet& t, const facet::FacetObject& obj,
                      const DdpOptions& opt) {
    if (node.size() >= t.size()) throw ArgumentError("expand: node already spans the tracklet");
    if (node.size() < 1) throw ArgumentError("expand: empty node");
    node.states.push_back(node.states.back());
    node.controls.push_back(Vec3::Zero());
    node = ddp_optimize(std::move(node), t, obj, opt);
    ++node.expansions;
    return node;
}

double heuristic(double cost, int n, int n_max, long k, const HeuristicParams& p) {
    if (n < 1) throw ArgumentError("heuristic: n must be >= 1");
    const double gap = std::max(0, n_max - n - p.n0);
    if (gap == 0) return 0;
    return cost / (p.a * n) * gap * std::pow(p.rho, double(std::max<long>(0, k - p.k0)));
}

BestFirstResult best_first_invert(const sim::Tracklet& t, const facet::FacetObject& obj, const BestFirstOptions& opt) {
    t.validate();
    if (t.channels() != obj.channels()) throw ArgumentError("best_first_invert: channel count mismatch");
    DdpOptions ddp = opt.ddp;
    ddp.eta_alpha = opt.eta_alpha.value_or(opt.eta_alpha_scale * opt.eta * (t.times[1] - t.times[0]));

    const auto seeds = opt.initial_attitudes.empty() ? uniform_quaternion_sample(opt.initial_count, opt.seed)
                                                     : opt.initial_attitudes;
    BestFirstResult res;
    res.expansions_by_length.assign(t.size() + 1, 0);
    std::uint64_t next_id = 0;

    std::vector<TrajectoryNode> open;
    open.reserve(seeds.size());
    for (const auto& q : seeds) {
        TrajectoryNode node;
        node.states.push_back({q, Vec3::Zero()});
        node = ddp_optimize(std::move(node), t, obj, ddp);
        if (t.size() > 1) {
            node = expand(std::move(node), t, obj, ddp);
            ++res.expansions_by_length[node.size()];
        }
        node.id = next_id++;
        open.push_back(std::move(node));
    }

    auto full = [&](const TrajectoryNode& n) { return n.size() == t.size(); };
    auto finish = [&](TrajectoryNode node, bool success) {
        res.losses = node_losses(node, t, obj, ddp.eta_alpha);
        if (success) {
            std::vector<double> times(t.times.begin(), t.times.end());
            std::vector<UnitQuaternion> q;
            for (const auto& s : node.states) q.push_back(s.q);
            res.history = AttitudeHistory(std::move(times), std::move(q));
        }
        res.node = std::move(node);
        res.success = success;
        return res;
    };

    for (const auto& n : open)
        if (full(n)) return finish(n, true);

    long k = 0;
    while (res.pops < opt.max_pops) {
        int n_max = 0;
        for (const auto& n : open) n_max = std::max(n_max, int(n.size()));
        std::size_t best = 0;
        double best_key = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < open.size(); ++i) {
            auto& n = open[i];
            n.heuristic = heuristic(n.cost, int(n.size()), n_max, k, opt.heuristic);
            const double key = n.cost + n.heuristic;
            if (key < best_key || (key == best_key && n.id < open[best].id)) {
                best_key = key;
                best = i;
            }
        }
        TrajectoryNode node = std::move(open[best]);
        open.erase(open.begin() + std::ptrdiff_t(best));
        ++res.pops;
        ++k;
        node = expand(std::move(node), t, obj, ddp);
        ++res.expansions_by_length[node.size()];
        if (full(node)) return finish(std::move(node), true);
        node.id = next_id++;
        open.push_back(std::move(node));
    }

    // Pop cap: report the longest (then cheapest) partial node.
    std::size_t best = 0;
    for (std::size_t i = 1; i < open.size(); ++i) {
        if (open[i].size() > open[best].size() ||
            (open[i].size() == open[best].size() && open[i].cost < open[best].cost))
            best = i;
    }
    return finish(std::move(open[best]), false);
}

}  // namespace lcinv::ddp
