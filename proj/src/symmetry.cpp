#include "lcinv/symmetry.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "lcinv/parallel.hpp"

namespace lcinv::sym {

namespace {

Mat3 diag3(double a, double b, double c) { return Vec3(a, b, c).asDiagonal(); }

Mat3 rz(double a) { return Eigen::AngleAxisd(a, Vec3::UnitZ()).toRotationMatrix(); }
Mat3 ry(double a) { return Eigen::AngleAxisd(a, Vec3::UnitY()).toRotationMatrix(); }
Mat3 rx(double a) { return Eigen::AngleAxisd(a, Vec3::UnitX()).toRotationMatrix(); }

std::vector<Mat3> h_frames(const std::vector<Vec3>& v_I, const std::vector<Vec3>& s_I) {
    if (v_I.size() != s_I.size()) throw ArgumentError("symmetry: v_I and s_I lengths differ");
    std::vector<Mat3> out(v_I.size());
    for (std::size_t i = 0; i < v_I.size(); ++i) {
        try {
            out[i] = h_frame(v_I[i], s_I[i]);
        } catch (const DegenerateGeometryError&) {
            throw DegenerateGeometryError("symmetry: degenerate view/sun geometry at sample " + std::to_string(i));
        }
    }
    return out;
}

double mean_distance(const AttitudeHistory& a, const AttitudeHistory& b) {
    double sum = 0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += angular_distance(a[i], b[i]);
    return sum / double(a.size());
}

bool admissible(const Mat3& t_h, const std::vector<Mat3>& body) {
    const double dh = t_h.determinant();
    for (const auto& tb : body)
        if (dh * tb.determinant() > 0) return true;
    return false;
}

}  // namespace

const char* label_name(HLabel l) {
    switch (l) {
        case HLabel::I: return "I";
        case HLabel::TH1: return "T_H1";
        case HLabel::TH2: return "T_H2";
        case HLabel::TH3: return "T_H3";
    }
    return "?";
}

std::vector<HSymmetry> h_group() {
    return {{HLabel::I, diag3(1, 1, 1)},
            {HLabel::TH1, diag3(1, -1, 1)},
            {HLabel::TH2, diag3(1, 1, -1)},
            {HLabel::TH3, diag3(1, -1, -1)}};
}

const HSymmetry& h_element(HLabel l) {
    static const std::vector<HSymmetry> group = h_group();
    return group[static_cast<int>(l)];
}

std::vector<SymmetryLabeledHistory> symmetric_histories(const AttitudeHistory& history,
                                                        const std::vector<Vec3>& v_I,
                                                        const std::vector<Vec3>& s_I,
                                                        const facet::FacetObject& obj) {
    if (history.size() != v_I.size()) throw ArgumentError("symmetric_histories: history and geometry lengths differ");
    const auto frames = h_frames(v_I, s_I);
    const auto& body = obj.symmetry_group();
    const std::vector<double> times(history.times().begin(), history.times().end());

    std::vector<SymmetryLabeledHistory> out;
    for (const auto& th : h_group()) {
        for (std::size_t b = 0; b < body.size(); ++b) {
            if (th.matrix.determinant() * body[b].determinant() < 0) continue;
            std::vector<UnitQuaternion> quats;
            quats.reserve(history.size());
            for (std::size_t i = 0; i < history.size(); ++i) {
                const Mat3& r_ih = frames[i];
                const Mat3 r = r_ih.transpose() * th.matrix * r_ih * to_matrix(history[i]) * body[b];
                quats.push_back(from_matrix(r));
            }
            AttitudeHistory candidate(times, std::move(quats));
            bool duplicate = false;
            for (const auto& kept : out) {
                if (mean_distance(kept.history, candidate) < 1e-9) {
                    duplicate = true;
                    break;
                }
            }
            if (!duplicate) out.push_back({std::move(candidate), th.label, int(b)});
        }
    }
    return out;
}

std::vector<SymmetricOmega> symmetric_omegas(const std::vector<double>& times, const std::vector<Vec3>& omega_bi,
                                             const GeometryFn& geometry, const facet::FacetObject& obj) {
    const std::size_t n = times.size();
    if (n < 2 || omega_bi.size() != n) throw ArgumentError("symmetric_omegas: need >= 2 samples of matching length");
    double spacing = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < n; ++i) spacing = std::min(spacing, times[i] - times[i - 1]);
    if (!(spacing > 0)) throw ArgumentError("symmetric_omegas: times must be strictly increasing");
    const double dt = std::min(1.0, spacing);

    std::vector<Mat3> r_ih(n);
    std::vector<Vec3> w_hi(n);
    for (std::size_t i = 0; i < n; ++i) {
        try {
            const auto [v, s] = geometry(times[i]);
            r_ih[i] = h_frame(v, s);
            w_hi[i] = omega_hi(geometry, times[i], dt).value;
        } catch (const DegenerateGeometryError&) {
            throw DegenerateGeometryError("symmetric_omegas: degenerate view/sun geometry at sample " +
                                          std::to_string(i));
        }
    }

    std::vector<SymmetricOmega> out;
    for (const auto& th : h_group()) {
        if (!admissible(th.matrix, obj.symmetry_group())) continue;
        const double sign = th.matrix.determinant();
        SymmetricOmega w{th.label, std::vector<Vec3>(n)};
        for (std::size_t i = 0; i < n; ++i) {
            w.omega_bi[i] = w_hi[i] + sign * r_ih[i].transpose() * th.matrix * r_ih[i] * (omega_bi[i] - w_hi[i]);
        }
        out.push_back(std::move(w));
    }
    return out;
}

OmegaTargets omega_bh_targets(const Vec3& omega_bi, const Mat3& r_ih, const Vec3& omega_hi) {
    OmegaTargets t;
    t.w_BH = r_ih * (omega_bi - omega_hi);
    t.w_BH_S = Vec3(t.w_BH.x(), std::abs(t.w_BH.y()), std::abs(t.w_BH.z()));
    t.abs_w_BH = t.w_BH.cwiseAbs();
    t.abs_w_BI = omega_bi.cwiseAbs();
    return t;
}

std::pair<Vec3, Vec3> euler_view_sun(double theta_h, double phi_h, double psi_h, double alpha) {
    const Mat3 r = rz(theta_h) * ry(-phi_h) * rx(psi_h);
    return {r * rz(0.5 * alpha) * Vec3::UnitX(), r * rz(-0.5 * alpha) * Vec3::UnitX()};
}

double single_spectrum_cost(const facet::FacetObject& obj, const facet::Spectrum& observed, const Vec3& v_B,
                            const Vec3& s_B) {
    if (observed.size() != obj.channels()) throw ArgumentError("single_spectrum_cost: channel count mismatch");
    return (observed - facet::lambert_spectrum(obj, v_B, s_B)).squaredNorm();
}

std::vector<double> linspace(double lo, double hi, int count) {
    if (count < 2) throw ArgumentError("linspace: count must be >= 2");
    std::vector<double> out(count);
    for (int i = 0; i < count; ++i) out[i] = lo + (hi - lo) * i / (count - 1);
    return out;
}

CostSurface cost_surface_scan(const facet::FacetObject& obj, const facet::Spectrum& observed, double alpha,
                              const std::vector<double>& theta, const std::vector<double>& phi, int psi_samples,
                              int workers) {
    if (theta.size() < 2 || phi.size() < 2) throw ArgumentError("cost_surface_scan: grid resolutions must be >= 2");
    if (psi_samples < 1) throw ArgumentError("cost_surface_scan: psi_samples must be >= 1");
    if (observed.size() != obj.channels()) throw ArgumentError("cost_surface_scan: channel count mismatch");
    CostSurface out{theta, phi, Eigen::MatrixXd(phi.size(), theta.size()), Eigen::MatrixXd(phi.size(), theta.size())};
    const std::size_t cols = theta.size();
    parallel_for(phi.size() * cols, workers, [&](std::size_t cell) {
        const std::size_t r = cell / cols, c = cell % cols;
        double best = std::numeric_limits<double>::infinity(), best_psi = 0;
        Eigen::VectorXd model(obj.channels());
        for (int k = 0; k < psi_samples; ++k) {
            const double psi = 2.0 * kPi * k / psi_samples;
            const auto [v, s] = euler_view_sun(theta[c], phi[r], psi, alpha);
            facet::lambert_spectrum_into(obj, v, s, model);
            const double cost = (observed - model).squaredNorm();
            if (cost < best) {
                best = cost;
                best_psi = psi;
            }
        }
        out.cost(r, c) = best;
        out.best_psi(r, c) = best_psi;
    });
    return out;
}

std::string cost_surface_csv(const CostSurface& s) {
    std::ostringstream os;
    os << std::setprecision(10) << "phi\\theta";
    for (double t : s.theta) os << ',' << t;
    os << '\n';
    for (std::size_t r = 0; r < s.phi.size(); ++r) {
        os << s.phi[r];
        for (Eigen::Index c = 0; c < s.cost.cols(); ++c) os << ',' << s.cost(r, c);
        os << '\n';
    }
    return os.str();
}

}  // namespace lcinv::sym
