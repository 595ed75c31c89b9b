#include "lcinv/inversion_ls.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

#include "lcinv/parallel.hpp"
#include "lcinv/symmetry.hpp"

namespace lcinv::ls {

namespace {

// d/dq of R(q)^T x for q = (w, u), as the homogeneous quadratic form
// (w^2 - u.u) x + 2 (u.x) u - 2 w (u cross x). 3 x 4.
Eigen::Matrix<double, 3, 4> rotate_inverse_jacobian(const Vec4& q, const Vec3& x) {
    const double w = q[0];
    const Vec3 u = q.tail<3>();
    Eigen::Matrix<double, 3, 4> j;
    j.col(0) = 2.0 * w * x - 2.0 * u.cross(x);
    j.rightCols<3>() = -2.0 * x * u.transpose() + 2.0 * (u * x.transpose() + u.dot(x) * Mat3::Identity()) +
                       2.0 * w * skew(x);
    return j;
}

Vec3 rotate_inverse(const Vec4& q, const Vec3& x) {
    const double w = q[0];
    const Vec3 u = q.tail<3>();
    return (w * w - u.squaredNorm()) * x + 2.0 * u.dot(x) * u - 2.0 * w * u.cross(x);
}

std::vector<Vec4> to_vec4(const AttitudeHistory& h) {
    std::vector<Vec4> out;
    out.reserve(h.size());
    for (const auto& q : h.quats()) out.push_back(q.coeffs());
    return out;
}

std::vector<Vec4> unpack(const Eigen::VectorXd& x) {
    std::vector<Vec4> out(x.size() / 4);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = x.segment<4>(4 * i).normalized();
    return out;
}

void normalize_blocks(Eigen::VectorXd& x) {
    for (Eigen::Index i = 0; i < x.size(); i += 4) x.segment<4>(i).normalize();
}

double required_spacing(const sim::Tracklet& t) {
    const auto dt = t.uniform_spacing();
    if (!dt) throw ArgumentError("inversion_ls: tracklet spacing is not uniform; resample upstream");
    return *dt;
}

AttitudeHistory history_from(const std::vector<double>& times, const Eigen::VectorXd& x) {
    std::vector<UnitQuaternion> q;
    q.reserve(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) q.push_back(UnitQuaternion::from_coeffs(x.segment<4>(4 * i)));
    return AttitudeHistory(times, std::move(q));
}

}  // namespace

LbfgsResult minimize_lbfgs(const Objective& f, Eigen::VectorXd x, const LbfgsOptions& opt, const Retraction& retract) {
    if (retract) retract(x);
    Eigen::VectorXd g(x.size());
    double fx = f(x, &g);
    LbfgsResult res;
    res.trace.push_back(fx);
    std::deque<Eigen::VectorXd> s_hist, y_hist;
    std::deque<double> rho_hist;

    auto finish = [&](bool converged) {
        res.x = std::move(x);
        res.f = fx;
        res.converged = converged;
        return res;
    };

    for (int it = 0; it < opt.max_iterations; ++it) {
        if (!std::isfinite(fx)) throw NumericalError("minimize_lbfgs: non-finite objective");
        if (fx <= opt.abs_tol || g.lpNorm<Eigen::Infinity>() < 1e-300) return finish(true);

        // Two-loop recursion.
        Eigen::VectorXd d = -g;
        std::vector<double> alpha(s_hist.size());
        for (int k = int(s_hist.size()) - 1; k >= 0; --k) {
            alpha[k] = rho_hist[k] * s_hist[k].dot(d);
            d -= alpha[k] * y_hist[k];
        }
        if (!s_hist.empty()) d *= s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
        for (std::size_t k = 0; k < s_hist.size(); ++k) {
            const double beta = rho_hist[k] * y_hist[k].dot(d);
            d += (alpha[k] - beta) * s_hist[k];
        }
        if (g.dot(d) >= 0) {
            s_hist.clear();
            y_hist.clear();
            rho_hist.clear();
            d = -g;
        }

        double step = s_hist.empty() ? std::min(1.0, 1.0 / d.norm()) : 1.0;
        Eigen::VectorXd x_new, g_new(x.size());
        double f_new = fx;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            x_new = x + step * d;
            if (retract) retract(x_new);
            f_new = f(x_new, &g_new);
            if (std::isfinite(f_new) && f_new <= fx + 1e-4 * step * g.dot(d) && f_new <= fx) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            if (!s_hist.empty()) {
                s_hist.clear();
                y_hist.clear();
                rho_hist.clear();
                continue;
            }
            return finish(true);  // no descent possible at working precision
        }

        const Eigen::VectorXd s = x_new - x, y = g_new - g;
        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            s_hist.push_back(s);
            y_hist.push_back(y);
            rho_hist.push_back(1.0 / sy);
            if (int(s_hist.size()) > opt.memory) {
                s_hist.pop_front();
                y_hist.pop_front();
                rho_hist.pop_front();
            }
        }
        x = std::move(x_new);
        g = std::move(g_new);
        fx = f_new;
        res.trace.push_back(fx);
        res.iterations = it + 1;

        const std::size_t n = res.trace.size();
        if (n > std::size_t(opt.window)) {
            const double past = res.trace[n - 1 - opt.window];
            if (past - fx <= opt.rel_tol * std::abs(past)) return finish(true);
        }
    }
    return finish(false);
}

double measurement_loss_grad(const std::vector<Vec4>& quats, const sim::Tracklet& t, const facet::FacetObject& obj,
                             Eigen::VectorXd* grad) {
    if (quats.size() > t.size()) throw ArgumentError("measurement_loss: history longer than tracklet");
    if (grad) grad->setZero(4 * Eigen::Index(quats.size()));
    double total = 0;
    Eigen::VectorXd model(obj.channels());
    for (std::size_t i = 0; i < quats.size(); ++i) {
        const Vec4& q = quats[i];
        const Vec3 v_b = rotate_inverse(q, t.v_I[i]);
        const Vec3 s_b = rotate_inverse(q, t.s_I[i]);
        if (!grad) {
            facet::lambert_spectrum_into(obj, v_b, s_b, model);
            total += (t.spectra[i] - model).squaredNorm();
            continue;
        }
        const auto jac = facet::lambert_spectrum_jacobian(obj, v_b, s_b);
        const Eigen::VectorXd r = t.spectra[i] - jac.value;
        total += r.squaredNorm();
        const Eigen::RowVector3d dv = -2.0 * r.transpose() * jac.d_view;
        const Eigen::RowVector3d ds = -2.0 * r.transpose() * jac.d_sun;
        Vec4 gq = (dv * rotate_inverse_jacobian(q, t.v_I[i]) + ds * rotate_inverse_jacobian(q, t.s_I[i])).transpose();
        gq -= q * q.dot(gq);  // tangent to the unit sphere
        grad->segment<4>(4 * i) = gq;
    }
    return total;
}

double measurement_loss(const AttitudeHistory& history, const sim::Tracklet& tracklet, const facet::FacetObject& obj) {
    if (history.size() != tracklet.size()) throw ArgumentError("measurement_loss: history and tracklet lengths differ");
    return measurement_loss_grad(to_vec4(history), tracklet, obj, nullptr);
}

double j_alpha(const std::vector<Vec4>& q, double dt, Eigen::VectorXd* grad) {
    if (q.size() < 3) throw ArgumentError("j_alpha: need at least 3 samples");
    if (!(dt > 0)) throw ArgumentError("j_alpha: dt must be positive");
    const std::size_t n = q.size();
    std::vector<Vec4> d(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) d[i] = hamilton(q[i + 1], quat_conj(q[i]));
    const double scale = 2.0 / (dt * dt);
    double total = 0;
    std::vector<Vec4> gd(n - 1, Vec4::Zero());
    for (std::size_t i = 0; i + 2 < n; ++i) {
        const Vec4 e = d[i + 1] - d[i];
        total += e.squaredNorm();
        gd[i + 1] += 2.0 * scale * e;
        gd[i] -= 2.0 * scale * e;
    }
    if (grad) {
        grad->setZero(4 * Eigen::Index(n));
        const Vec4 conj_sign(1, -1, -1, -1);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            // d_i = q_{i+1} * conj(q_i) = R(conj q_i) q_{i+1} = L(q_{i+1}) C q_i
            grad->segment<4>(4 * (i + 1)) += right_mult_matrix(quat_conj(q[i])).transpose() * gd[i];
            grad->segment<4>(4 * i) +=
                conj_sign.asDiagonal() * (left_mult_matrix(q[i + 1]).transpose() * gd[i]);
        }
    }
    return scale * total;
}

double j_alpha(const AttitudeHistory& h) {
    const auto t = h.times();
    const double dt = t[1] - t[0];
    for (std::size_t i = 2; i < t.size(); ++i)
        if (std::abs((t[i] - t[i - 1]) - dt) > 1e-9) throw ArgumentError("j_alpha: non-uniform time spacing");
    return j_alpha(to_vec4(h), dt);
}

std::vector<Vec3> fibonacci_sphere(int count) {
    if (count < 1) throw ArgumentError("fibonacci_sphere: count must be >= 1");
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    std::vector<Vec3> out(count);
    for (int i = 0; i < count; ++i) {
        const double z = 1.0 - (2.0 * i + 1.0) / count;
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        out[i] = Vec3(r * std::cos(golden * i), r * std::sin(golden * i), z);
    }
    return out;
}

namespace {

// Measurement loss of a fixed-axis history over the first `count` samples.
double fixed_axis_cost(const sim::Tracklet& t, const facet::FacetObject& obj, const UnitQuaternion& q0,
                       const Vec3& omega, std::size_t count) {
    Eigen::VectorXd model(obj.channels());
    double total = 0;
    for (std::size_t i = 0; i < count; ++i) {
        const UnitQuaternion q = from_rotation_vector(omega * (t.times[i] - t.times[0])) * q0;
        const UnitQuaternion qc = q.conjugate();
        facet::lambert_spectrum_into(obj, rotate(qc, t.v_I[i]), rotate(qc, t.s_I[i]), model);
        total += (t.spectra[i] - model).squaredNorm();
    }
    return total;
}

// Refines (q0, omega) by L-BFGS with central-difference gradients in the
// 6 parameters (tangent perturbation of q0, omega).
std::pair<UnitQuaternion, Vec3> refine_fixed_axis(const sim::Tracklet& t, const facet::FacetObject& obj,
                                                  UnitQuaternion q0, Vec3 omega, std::size_t count) {
    auto f = [&](const Eigen::VectorXd& p, Eigen::VectorXd* g) {
        auto eval = [&](const Eigen::VectorXd& x) {
            return fixed_axis_cost(t, obj, from_rotation_vector(x.head<3>()) * q0, x.tail<3>(), count);
        };
        const double v = eval(p);
        if (g) {
            g->resize(6);
            Eigen::VectorXd x = p;
            for (int k = 0; k < 6; ++k) {
                const double h = 1e-7;
                x[k] = p[k] + h;
                const double fp = eval(x);
                x[k] = p[k] - h;
                const double fm = eval(x);
                x[k] = p[k];
                (*g)[k] = (fp - fm) / (2 * h);
            }
        }
        return v;
    };
    Eigen::VectorXd p0(6);
    p0 << 0, 0, 0, omega;
    LbfgsOptions o;
    o.max_iterations = 300;
    o.rel_tol = 1e-12;
    const auto r = minimize_lbfgs(f, p0, o);
    return {from_rotation_vector(r.x.head<3>()) * q0, r.x.tail<3>()};
}

}  // namespace

FixedAxisGuess fixed_axis_guess(const sim::Tracklet& t, const facet::FacetObject& obj,
                                const std::vector<double>& periods, const FixedAxisOptions& opt) {
    if (periods.empty()) throw ArgumentError("fixed_axis_guess: empty period candidate list");
    t.validate();
    if (t.channels() != obj.channels()) throw ArgumentError("fixed_axis_guess: channel count mismatch");
    const auto attitudes =
        opt.attitudes.empty() ? uniform_quaternion_sample(opt.attitude_samples, opt.seed) : opt.attitudes;
    const auto axes = fibonacci_sphere(opt.axis_samples);

    std::vector<double> trial;
    for (double p : periods) {
        if (!(p > 0)) throw ArgumentError("fixed_axis_guess: periods must be positive");
        trial.push_back(p);
        trial.push_back(2.0 * p);
    }
    const std::size_t per_period = attitudes.size() * axes.size();
    auto segment = [&](double period) {
        std::size_t seg = 1;
        while (seg < t.size() && t.times[seg] - t.times[0] <= period) ++seg;
        return std::max<std::size_t>(seg, 3);
    };
    std::vector<SeedCost> seeds(trial.size() * per_period);
    parallel_for(seeds.size(), opt.workers, [&](std::size_t idx) {
        const std::size_t p = idx / per_period, a = (idx % per_period) / axes.size(), x = idx % axes.size();
        const Vec3 omega = axes[x] * (2.0 * kPi / trial[p]);
        const std::size_t count = opt.score_one_period ? segment(trial[p]) : t.size();
        seeds[idx] = {idx, trial[p], attitudes[a], omega, fixed_axis_cost(t, obj, attitudes[a], omega, count)};
    });
    std::stable_sort(seeds.begin(), seeds.end(), [](const SeedCost& a, const SeedCost& b) { return a.cost < b.cost; });

    UnitQuaternion best_q = seeds.front().q0;
    Vec3 best_w = seeds.front().omega;
    double best_period = seeds.front().period;
    double best_cost = fixed_axis_cost(t, obj, best_q, best_w, t.size());
    const int top = std::min<int>(opt.refine_top, int(seeds.size()));
    if (top > 0) {
        // Stage 1: every top seed on its one-period segment.
        std::vector<std::pair<UnitQuaternion, Vec3>> refined(top);
        std::vector<double> seg_cost(top);
        parallel_for(std::size_t(top), opt.workers, [&](std::size_t k) {
            const SeedCost& s = seeds[k];
            const std::size_t seg = segment(s.period);
            refined[k] = refine_fixed_axis(t, obj, s.q0, s.omega, seg);
            seg_cost[k] = fixed_axis_cost(t, obj, refined[k].first, refined[k].second, seg) / double(seg);
        });
        std::vector<int> order(top);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return seg_cost[a] < seg_cost[b]; });

        // Stage 2: the best few, extended over doubling spans to the full length.
        const int keep = std::min(top, std::max(1, opt.extend_top));
        std::vector<std::pair<UnitQuaternion, Vec3>> full(keep);
        std::vector<double> cost(keep);
        parallel_for(std::size_t(keep), opt.workers, [&](std::size_t r) {
            auto p = refined[order[r]];
            std::size_t span = segment(seeds[order[r]].period);
            while (span < t.size()) {
                span = std::min(t.size(), 2 * span);
                p = refine_fixed_axis(t, obj, p.first, p.second, span);
            }
            full[r] = p;
            cost[r] = fixed_axis_cost(t, obj, p.first, p.second, t.size());
        });
        for (int r = 0; r < keep; ++r) {
            if (cost[r] < best_cost) {
                best_q = full[r].first;
                best_w = full[r].second;
                best_period = seeds[order[r]].period;
                best_cost = cost[r];
            }
        }
    }
    return {sim::fixed_axis_history(best_q, best_w, t.times), best_q, best_w, best_period, seeds.front().cost,
            best_cost, std::move(seeds)};
}

double total_loss(const AttitudeHistory& h, const sim::Tracklet& t, const facet::FacetObject& obj, double eta) {
    return measurement_loss(h, t, obj) + eta * j_alpha(h);
}

LsSolution optimize(const sim::Tracklet& t, const facet::FacetObject& obj, const std::vector<AttitudeHistory>& seeds,
                    const LsOptions& opt) {
    if (seeds.empty()) throw ArgumentError("optimize: need at least one initial history");
    if (!(opt.eta >= 0)) throw ArgumentError("optimize: eta must be >= 0");
    t.validate();
    if (t.channels() != obj.channels()) throw ArgumentError("optimize: channel count mismatch");
    const double dt = required_spacing(t);
    for (const auto& s : seeds)
        if (s.size() != t.size()) throw ArgumentError("optimize: seed length differs from tracklet");

    const Objective objective = [&](const Eigen::VectorXd& x, Eigen::VectorXd* g) {
        const auto q = unpack(x);
        Eigen::VectorXd ge, gj;
        const double e = measurement_loss_grad(q, t, obj, g ? &ge : nullptr);
        const double j = j_alpha(q, dt, g ? &gj : nullptr);
        if (g) {
            *g = ge;
            for (std::size_t i = 0; i < q.size(); ++i) {
                Vec4 gq = gj.segment<4>(4 * i);
                gq -= q[i] * q[i].dot(gq);
                // chain through x / |x|
                g->segment<4>(4 * i) += opt.eta * gq;
                g->segment<4>(4 * i) /= x.segment<4>(4 * i).norm();
            }
        }
        return e + opt.eta * j;
    };

    std::vector<LbfgsResult> runs(seeds.size());
    parallel_for(seeds.size(), opt.workers, [&](std::size_t k) {
        Eigen::VectorXd x0(4 * t.size());
        for (std::size_t i = 0; i < t.size(); ++i) x0.segment<4>(4 * i) = seeds[k][i].coeffs();
        runs[k] = minimize_lbfgs(objective, x0, opt.lbfgs, normalize_blocks);
    });
    std::size_t best = 0;
    std::vector<double> losses;
    for (std::size_t k = 0; k < runs.size(); ++k) {
        losses.push_back(runs[k].f);
        if (runs[k].f < runs[best].f) best = k;
    }
    AttitudeHistory h = history_from(t.times, runs[best].x);
    const double e = measurement_loss(h, t, obj);
    const double j = j_alpha(h);
    return {std::move(h), e, j, e + opt.eta * j, runs[best].converged, runs[best].iterations, int(best),
            std::move(losses)};
}

LsPipelineResult invert(const sim::Tracklet& t, const facet::FacetObject& obj, const std::vector<double>& periods,
                        const FixedAxisOptions& guess_opt, const LsOptions& opt) {
    FixedAxisGuess guess = fixed_axis_guess(t, obj, periods, guess_opt);
    std::vector<AttitudeHistory> seeds;
    for (auto& s : sym::symmetric_histories(guess.history, t.v_I, t.s_I, obj)) seeds.push_back(std::move(s.history));
    LsSolution sol = optimize(t, obj, seeds, opt);
    return {std::move(guess), std::move(sol)};
}

}  // namespace lcinv::ls
