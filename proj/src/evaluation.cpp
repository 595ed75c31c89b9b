#include "lcinv/evaluation.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

namespace lcinv::eval {

double rms_theta(const AttitudeHistory& est, const AttitudeHistory& ref) {
    if (est.size() != ref.size()) throw ArgumentError("rms_theta: histories have different lengths");
    double sum = 0;
    for (std::size_t i = 0; i < est.size(); ++i) {
        if (std::abs(est.times()[i] - ref.times()[i]) > 1e-9) throw ArgumentError("rms_theta: time grids differ");
        const double a = angular_distance(est[i], ref[i]);
        sum += a * a;
    }
    return std::sqrt(sum / double(est.size())) / kDeg;
}

EvalReport evaluate_against_symmetry_set(const AttitudeHistory& estimate, const AttitudeHistory& truth,
                                         const std::vector<Vec3>& v_I, const std::vector<Vec3>& s_I,
                                         const facet::FacetObject& obj) {
    EvalReport r;
    for (const auto& s : sym::symmetric_histories(truth, v_I, s_I, obj)) {
        r.rows.push_back({s.t_h, s.t_b, rms_theta(estimate, s.history)});
        if (r.rows.back().rms_deg < r.rows[r.best].rms_deg) r.best = r.rows.size() - 1;
    }
    return r;
}

double replay_residual(const AttitudeHistory& est, const sim::Tracklet& t, const facet::FacetObject& obj) {
    if (est.size() != t.size()) throw ArgumentError("replay_residual: history and tracklet lengths differ");
    const auto model = sim::replay_spectra(obj, est, t.v_I, t.s_I);
    double sum = 0;
    for (std::size_t i = 0; i < t.size(); ++i) sum += (t.spectra[i] - model[i]).squaredNorm();
    return std::sqrt(sum / double(t.size() * std::size_t(t.channels())));
}

EvalReport evaluate_tracklet(const AttitudeHistory& estimate, const sim::Tracklet& t, const facet::FacetObject& obj) {
    if (!t.truth) throw DataError("evaluate: tracklet has no 'truth' block");
    EvalReport r = evaluate_against_symmetry_set(estimate, t.truth_history(), t.v_I, t.s_I, obj);
    r.replay_residual = replay_residual(estimate, t, obj);
    return r;
}

Vec3 euler_zyx(const Mat3& r) {
    const double sp = std::clamp(-r(2, 0), -1.0, 1.0);
    const double pitch = std::asin(sp);
    // Tested on sin(pitch): asin amplifies rounding near +-1.
    if (std::abs(sp) >= 1.0 - 1e-12) {
        const double yaw = std::atan2(-r(0, 1), r(1, 1));
        return {yaw, pitch, 0.0};
    }
    return {std::atan2(r(1, 0), r(0, 0)), pitch, std::atan2(r(2, 1), r(2, 2))};
}

std::string euler_csv(const AttitudeHistory& h) {
    std::ostringstream os;
    os << std::setprecision(10) << "t,yaw_deg,pitch_deg,roll_deg\n";
    for (std::size_t i = 0; i < h.size(); ++i) {
        const Vec3 e = euler_zyx(to_matrix(h[i])) / kDeg;
        os << h.times()[i] << ',' << e[0] << ',' << e[1] << ',' << e[2] << '\n';
    }
    return os.str();
}

std::string replay_csv(const AttitudeHistory& est, const sim::Tracklet& t, const facet::FacetObject& obj) {
    const auto model = sim::replay_spectra(obj, est, t.v_I, t.s_I);
    std::ostringstream os;
    os << std::setprecision(10) << 't';
    for (int c = 0; c < t.channels(); ++c) os << ",obs_" << c;
    for (int c = 0; c < t.channels(); ++c) os << ",model_" << c;
    os << '\n';
    for (std::size_t i = 0; i < t.size(); ++i) {
        os << t.times[i];
        for (int c = 0; c < t.channels(); ++c) os << ',' << t.spectra[i][c];
        for (int c = 0; c < t.channels(); ++c) os << ',' << model[i][c];
        os << '\n';
    }
    return os.str();
}

std::string report_table(const EvalReport& r) {
    std::ostringstream os;
    os << std::left << std::setw(8) << "T_H" << std::setw(6) << "T_B" << std::right << std::setw(12)
       << "RMS(deg)" << '\n';
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
        const auto& row = r.rows[i];
        os << std::left << std::setw(8) << sym::label_name(row.t_h) << std::setw(6) << row.t_b << std::right
           << std::setw(12) << std::fixed << std::setprecision(2) << row.rms_deg << (i == r.best ? "  *" : "")
           << '\n';
    }
    os << "replay residual " << std::scientific << std::setprecision(3) << r.replay_residual << '\n';
    return os.str();
}

}  // namespace lcinv::eval
