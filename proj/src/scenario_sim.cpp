#include "lcinv/scenario_sim.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace lcinv::sim {

namespace {

constexpr double kJ2000Unix = 946728000.0;  // 2000-01-01T12:00:00 UTC
constexpr double kDay = 86400.0;

// Days since 1970-01-01 for a proleptic Gregorian date.
long long days_from_civil(long long y, unsigned m, unsigned d) {
    y -= m <= 2;
    const long long era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<long long>(doe) - 719468;
}

Mat3 rot_z(double a) {
    Mat3 r;
    r << std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a), 0, 0, 0, 1;
    return r;
}

Mat3 rot_x(double a) {
    Mat3 r;
    r << 1, 0, 0, 0, std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a);
    return r;
}

using State7 = Eigen::Matrix<double, 7, 1>;

State7 rigid_body_rhs(const State7& y, const InertiaTensor& j) {
    const Vec4 q = y.head<4>();
    const Vec3 w = y.tail<3>();
    State7 d;
    d.head<4>() = 0.5 * hamilton(q, Vec4(0.0, w.x(), w.y(), w.z()));
    d.tail<3>() = j.inverse() * ((j.matrix() * w).cross(w));
    return d;
}

Vec3 random_unit(std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Vec3 v;
    do {
        v = Vec3(g(rng), g(rng), g(rng));
    } while (v.norm() < 1e-9);
    return v.normalized();
}

UnitQuaternion random_quaternion(std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    return UnitQuaternion(g(rng), g(rng), g(rng), g(rng));
}

}  // namespace

double utc_seconds(int year, int month, int day, int hour, int minute, double second) {
    const long long days = days_from_civil(year, unsigned(month), unsigned(day));
    return double(days) * kDay + hour * 3600.0 + minute * 60.0 + second - kJ2000Unix;
}

double parse_utc(const std::string& iso) {
    int y = 0, mo = 0, d = 0, h = 0, mi = 0;
    double s = 0;
    char dash1 = 0, dash2 = 0;
    std::istringstream in(iso);
    in >> y >> dash1 >> mo >> dash2 >> d;
    if (!in || dash1 != '-' || dash2 != '-') throw ArgumentError("parse_utc: expected YYYY-MM-DD, got '" + iso + "'");
    if (in.peek() == 'T' || in.peek() == ' ') {
        char sep = 0, c1 = 0, c2 = 0;
        in >> sep >> h >> c1 >> mi >> c2 >> s;
        if (!in || c1 != ':' || c2 != ':') throw ArgumentError("parse_utc: bad time of day in '" + iso + "'");
    }
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || h < 0 || h > 23 || mi < 0 || mi > 59 || s < 0 || s >= 61) {
        throw ArgumentError("parse_utc: field out of range in '" + iso + "'");
    }
    return utc_seconds(y, mo, d, h, mi, s);
}

void OrbitElements::validate() const {
    if (!(semi_major_axis_km > kEarthRadius)) throw ArgumentError("orbit: semi-major axis must exceed Earth radius");
    if (!(eccentricity >= 0 && eccentricity < 1)) throw ArgumentError("orbit: eccentricity must be in [0, 1)");
}

double OrbitElements::mean_motion() const {
    return std::sqrt(kMuEarth / (semi_major_axis_km * semi_major_axis_km * semi_major_axis_km));
}

double OrbitElements::period() const { return 2.0 * kPi / mean_motion(); }

double solve_kepler(double mean_anomaly, double e) {
    const double m = std::remainder(mean_anomaly, 2.0 * kPi);
    double ecc = e > 0.8 ? std::copysign(kPi, m) : m;
    for (int it = 0; it < 50; ++it) {
        const double f = ecc - e * std::sin(ecc) - m;
        const double step = f / (1.0 - e * std::cos(ecc));
        ecc -= step;
        if (std::abs(step) < 1e-12) return ecc;
    }
    throw NumericalError("solve_kepler: Newton iteration did not converge");
}

StateVector propagate_kepler(const OrbitElements& el, double t) {
    el.validate();
    const double a = el.semi_major_axis_km, e = el.eccentricity;
    const double n = el.mean_motion();
    const double ecc = solve_kepler(el.mean_anomaly + n * (t - el.epoch), e);
    const double ce = std::cos(ecc), se = std::sin(ecc);
    const double b = std::sqrt(1.0 - e * e);
    const Vec3 r_pf(a * (ce - e), a * b * se, 0.0);
    const double rate = n * a / (1.0 - e * ce);
    const Vec3 v_pf(-rate * se, rate * b * ce, 0.0);
    const Mat3 rot = rot_z(el.raan) * rot_x(el.inclination) * rot_z(el.arg_perigee);
    return {rot * r_pf, rot * v_pf};
}

void GroundStation::validate() const {
    if (!(std::abs(latitude) <= kPi / 2)) throw ArgumentError("station: |latitude| must not exceed pi/2");
}

double gmst(double t) {
    const double days = t / kDay;
    const double deg = 280.46061837 + 360.98564736629 * days;
    return std::fmod(deg, 360.0) * kDeg;
}

Vec3 station_position_eci(const GroundStation& st, double t) {
    const double e2 = kEarthFlattening * (2.0 - kEarthFlattening);
    const double sl = std::sin(st.latitude), cl = std::cos(st.latitude);
    const double nrad = kEarthRadius / std::sqrt(1.0 - e2 * sl * sl);
    const Vec3 ecef((nrad + st.altitude_km) * cl * std::cos(st.longitude),
                    (nrad + st.altitude_km) * cl * std::sin(st.longitude),
                    (nrad * (1.0 - e2) + st.altitude_km) * sl);
    return rot_z(gmst(t)) * ecef;
}

Vec3 station_up_eci(const GroundStation& st, double t) {
    const double cl = std::cos(st.latitude);
    const Vec3 up(cl * std::cos(st.longitude), cl * std::sin(st.longitude), std::sin(st.latitude));
    return rot_z(gmst(t)) * up;
}

Vec3 sun_position_eci(double t) {
    const double n = t / kDay;
    const double mean_lon = (280.460 + 0.9856474 * n) * kDeg;
    const double g = (357.528 + 0.9856003 * n) * kDeg;
    const double lambda = mean_lon + (1.915 * std::sin(g) + 0.020 * std::sin(2.0 * g)) * kDeg;
    const double eps = (23.439 - 0.0000004 * n) * kDeg;
    const double dist = (1.00014 - 0.01671 * std::cos(g) - 0.00014 * std::cos(2.0 * g)) * kAu;
    return dist * Vec3(std::cos(lambda), std::cos(eps) * std::sin(lambda), std::sin(eps) * std::sin(lambda));
}

Vec3 sun_direction_eci(double t) { return sun_position_eci(t).normalized(); }

bool in_earth_shadow(const Vec3& r_sat, const Vec3& sun_dir) {
    const double along = r_sat.dot(sun_dir);
    if (along >= 0) return false;
    return (r_sat - along * sun_dir).norm() < kEarthRadius;
}

double elevation(const GroundStation& st, const Vec3& r_sat, double t) {
    const Vec3 los = (r_sat - station_position_eci(st, t)).normalized();
    return std::asin(std::clamp(los.dot(station_up_eci(st, t)), -1.0, 1.0));
}

bool observable(const OrbitElements& el, const GroundStation& st, const SunModel& sun, double t,
                double min_elevation) {
    const Vec3 r = propagate_kepler(el, t).position;
    if (elevation(st, r, t) <= min_elevation) return false;
    const Vec3 s = sun(t);
    if (in_earth_shadow(r, s)) return false;
    // Geometric night: sun below the local horizon, no twilight refinement.
    return s.dot(station_up_eci(st, t)) < 0;
}

std::vector<Window> visibility_windows(const OrbitElements& el, const GroundStation& st, const SunModel& sun,
                                       double t_start, double t_end, double step, double min_elevation) {
    if (!std::isfinite(t_start) || !std::isfinite(t_end)) throw ArgumentError("visibility_windows: non-finite range");
    if (!(step > 0)) throw ArgumentError("visibility_windows: step must be positive");
    el.validate();
    st.validate();
    auto obs = [&](double t) { return observable(el, st, sun, t, min_elevation); };
    auto refine = [&](double lo, double hi, bool lo_state) {
        for (int it = 0; it < 40 && hi - lo > 1e-6; ++it) {
            const double mid = 0.5 * (lo + hi);
            (obs(mid) == lo_state ? lo : hi) = mid;
        }
        return lo_state ? lo : hi;  // the boundary sample that is observable
    };
    std::vector<Window> out;
    const long long count = static_cast<long long>(std::floor((t_end - t_start) / step));
    bool prev = obs(t_start);
    double open = t_start;
    for (long long k = 1; k <= count; ++k) {
        const double t = t_start + double(k) * step;
        const bool cur = obs(t);
        if (cur && !prev) open = refine(t - step, t, false);
        if (!cur && prev) {
            const double close = refine(t - step, t, true);
            if (close - open >= step) out.push_back({open, close});
        }
        prev = cur;
    }
    if (prev) {
        const double close = t_start + double(count) * step;
        if (close - open >= step) out.push_back({open, close});
    }
    return out;
}

InertiaTensor::InertiaTensor(const Mat3& j) : j_(j) {
    if ((j - j.transpose()).cwiseAbs().maxCoeff() > 1e-12) throw ArgumentError("InertiaTensor: not symmetric");
    Eigen::SelfAdjointEigenSolver<Mat3> eig(j);
    if (eig.eigenvalues().minCoeff() <= 0) throw ArgumentError("InertiaTensor: not positive definite");
    inv_ = j.inverse();
}

InertiaTensor InertiaTensor::spherical() { return InertiaTensor(Mat3::Identity()); }

InertiaTensor InertiaTensor::prolate(const Mat3& r, double gamma) {
    Mat3 j = r * Vec3(gamma, 1.0, 1.0).asDiagonal() * r.transpose();
    return InertiaTensor(0.5 * (j + j.transpose()));
}

InertiaTensor InertiaTensor::oblate(const Mat3& r, double gamma) {
    Mat3 j = r * Vec3(gamma, gamma, 1.0).asDiagonal() * r.transpose();
    return InertiaTensor(0.5 * (j + j.transpose()));
}

RigidBodyTrajectory propagate_torque_free_with_rates(const InertiaTensor& j, const UnitQuaternion& q0,
                                                     const AngularVelocity& w0, const std::vector<double>& times,
                                                     double max_step) {
    if (w0.frame != Frame::BI) throw ArgumentError("propagate_torque_free: w0 must be tagged BI");
    if (times.size() < 2) throw ArgumentError("propagate_torque_free: need at least 2 times");
    max_step = std::min(max_step, 0.1);
    State7 y;
    y.head<4>() = q0.coeffs();
    y.tail<3>() = to_matrix(q0).transpose() * w0.value;  // body-frame rate
    std::vector<UnitQuaternion> quats{q0};
    std::vector<Vec3> rates{w0.value};
    for (std::size_t k = 1; k < times.size(); ++k) {
        const double span = times[k] - times[k - 1];
        if (!(span > 0)) throw ArgumentError("propagate_torque_free: times must be strictly increasing");
        const int steps = std::max(1, int(std::ceil(span / max_step - 1e-12)));
        const double h = span / steps;
        for (int s = 0; s < steps; ++s) {
            const State7 k1 = rigid_body_rhs(y, j);
            const State7 k2 = rigid_body_rhs(y + 0.5 * h * k1, j);
            const State7 k3 = rigid_body_rhs(y + 0.5 * h * k2, j);
            const State7 k4 = rigid_body_rhs(y + h * k3, j);
            y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            y.head<4>().normalize();
        }
        const UnitQuaternion q = UnitQuaternion::from_coeffs(y.head<4>());
        quats.push_back(q);
        rates.push_back(to_matrix(q) * y.tail<3>());
    }
    return {AttitudeHistory(times, std::move(quats)), std::move(rates)};
}

AttitudeHistory propagate_torque_free(const InertiaTensor& j, const UnitQuaternion& q0, const AngularVelocity& w0,
                                      const std::vector<double>& times) {
    return propagate_torque_free_with_rates(j, q0, w0, times).history;
}

AttitudeHistory fixed_axis_history(const UnitQuaternion& q0, const Vec3& omega_bi, const std::vector<double>& times) {
    std::vector<UnitQuaternion> quats;
    quats.reserve(times.size());
    for (double t : times) quats.push_back(quat_multiply(from_rotation_vector(omega_bi * (t - times.front())), q0));
    return AttitudeHistory(times, std::move(quats));
}

double sample_omega_magnitude(double u, double w_min, double w_max) {
    if (!(u >= 0 && u <= 1)) throw ArgumentError("sample_omega_magnitude: u must lie in [0, 1]");
    if (!(w_min > 0 && w_max > w_min)) throw ArgumentError("sample_omega_magnitude: need 0 < w_min < w_max");
    return std::exp(u * (std::log(w_max) - std::log(w_min)) + std::log(w_min));
}

void Tracklet::validate() const {
    const std::size_t n = times.size();
    if (n < 2) throw DataError("tracklet: need at least 2 samples");
    if (spectra.size() != n) throw DataError("tracklet: 'spectra' length differs from 'times'");
    if (v_I.size() != n) throw DataError("tracklet: 'v_I' length differs from 'times'");
    if (s_I.size() != n) throw DataError("tracklet: 's_I' length differs from 'times'");
    const auto k = spectra.front().size();
    if (k < 1) throw DataError("tracklet: spectra must have at least one channel");
    for (std::size_t i = 0; i < n; ++i) {
        const std::string at = " at sample " + std::to_string(i);
        if (i > 0 && !(times[i] > times[i - 1])) throw DataError("tracklet: 'times' not strictly increasing" + at);
        if (spectra[i].size() != k) throw DataError("tracklet: 'spectra' channel count changes" + at);
        if (!spectra[i].allFinite()) throw DataError("tracklet: non-finite 'spectra'" + at);
        if (std::abs(v_I[i].norm() - 1.0) > 1e-9) throw DataError("tracklet: 'v_I' not unit" + at);
        if (std::abs(s_I[i].norm() - 1.0) > 1e-9) throw DataError("tracklet: 's_I' not unit" + at);
        if (std::abs(v_I[i].dot(s_I[i])) >= 1.0 - 1e-9) throw DataError("tracklet: degenerate geometry" + at);
    }
    if (truth && truth->quats.size() != n) throw DataError("tracklet: 'truth.quats' length differs from 'times'");
}

AttitudeHistory Tracklet::truth_history() const {
    if (!truth) throw DataError("tracklet: no truth block");
    return AttitudeHistory(times, truth->quats);
}

GeometryFn Tracklet::geometry() const {
    return [times = times, v = v_I, s = s_I](double t) -> std::pair<Vec3, Vec3> {
        if (t <= times.front()) return {v.front(), s.front()};
        if (t >= times.back()) return {v.back(), s.back()};
        const auto it = std::upper_bound(times.begin(), times.end(), t);
        const std::size_t hi = std::size_t(it - times.begin());
        const std::size_t lo = hi - 1;
        const double f = (t - times[lo]) / (times[hi] - times[lo]);
        return {((1 - f) * v[lo] + f * v[hi]).normalized(), ((1 - f) * s[lo] + f * s[hi]).normalized()};
    };
}

std::optional<double> Tracklet::uniform_spacing() const {
    if (times.size() < 2) return std::nullopt;
    const double dt = times[1] - times[0];
    for (std::size_t i = 2; i < times.size(); ++i)
        if (std::abs((times[i] - times[i - 1]) - dt) > 1e-9) return std::nullopt;
    return dt;
}

Tracklet Tracklet::slice(std::size_t first, std::size_t count) const {
    if (first + count > times.size()) throw ArgumentError("Tracklet::slice: range out of bounds");
    auto sub = [&](const auto& v) { return std::decay_t<decltype(v)>(v.begin() + first, v.begin() + first + count); };
    Tracklet out{sub(times), sub(spectra), sub(v_I), sub(s_I), std::nullopt};
    if (truth) out.truth = TrackletTruth{sub(truth->quats), truth->omega_bi_mid};
    return out;
}

std::vector<facet::Spectrum> replay_spectra(const facet::FacetObject& object, const AttitudeHistory& history,
                                            const std::vector<Vec3>& v_I, const std::vector<Vec3>& s_I) {
    if (history.size() != v_I.size() || history.size() != s_I.size()) {
        throw ArgumentError("replay_spectra: history and geometry lengths differ");
    }
    std::vector<facet::Spectrum> out;
    out.reserve(history.size());
    for (std::size_t i = 0; i < history.size(); ++i) {
        const UnitQuaternion qc = history[i].conjugate();
        out.push_back(facet::lambert_spectrum(object, rotate(qc, v_I[i]), rotate(qc, s_I[i])));
    }
    return out;
}

void DatasetConfig::validate() const {
    orbit.validate();
    station.validate();
    if (!(t_end > t_start)) throw ArgumentError("dataset: t_end must be after t_start");
    if (!(search_step > 0)) throw ArgumentError("dataset: search_step must be positive");
    if (dynamics == Dynamics::TorqueFree && (inertia < 1 || inertia > 3)) {
        throw ArgumentError("dataset: inertia must be 1, 2 or 3");
    }
    if (!(omega_min > 0 && omega_max >= omega_min)) throw ArgumentError("dataset: need 0 < omega_min <= omega_max");
    if (tracklets_per_window < 1) throw ArgumentError("dataset: tracklets_per_window must be >= 1");
    if (samples < 2 || min_samples < 2 || min_samples > samples) {
        throw ArgumentError("dataset: need 2 <= min_samples <= samples");
    }
    if (!(sample_dt > 0)) throw ArgumentError("dataset: sample_dt must be positive");
    if (max_windows < 0) throw ArgumentError("dataset: max_windows must be >= 0");
    if (!(noise_sigma >= 0)) throw ArgumentError("dataset: noise_sigma must be >= 0");
}

std::vector<Tracklet> generate_dataset(const DatasetConfig& cfg, const facet::FacetObject& object) {
    cfg.validate();
    const SunModel sun = sun_direction_eci;
    auto windows = visibility_windows(cfg.orbit, cfg.station, sun, cfg.t_start, cfg.t_end, cfg.search_step,
                                      cfg.min_elevation);
    const auto seed_lo = std::uint32_t(cfg.seed & 0xffffffffu);
    const auto seed_hi = std::uint32_t(cfg.seed >> 32);

    std::optional<InertiaTensor> inertia;
    if (cfg.dynamics == Dynamics::TorqueFree) {
        std::seed_seq seq{seed_lo, seed_hi, 0xA11CEu};
        std::mt19937_64 rng(seq);
        const Mat3 r = to_matrix(random_quaternion(rng));
        inertia = cfg.inertia == 1   ? InertiaTensor::spherical()
                  : cfg.inertia == 2 ? InertiaTensor::prolate(r, cfg.gamma)
                                     : InertiaTensor::oblate(r, cfg.gamma);
    }

    std::vector<Tracklet> out;
    int used_windows = 0;
    for (std::size_t w = 0; w < windows.size(); ++w) {
        if (cfg.max_windows > 0 && used_windows >= cfg.max_windows) break;
        const Window& win = windows[w];
        const int available = int(std::floor(win.duration() / cfg.sample_dt)) + 1;
        const int count = std::min(cfg.samples, available);
        if (count < cfg.min_samples) continue;
        ++used_windows;

        std::vector<double> times(count);
        std::vector<Vec3> v_I(count), s_I(count);
        for (int i = 0; i < count; ++i) {
            const double t = win.start + i * cfg.sample_dt;
            times[i] = t;
            const Vec3 r = propagate_kepler(cfg.orbit, t).position;
            v_I[i] = (station_position_eci(cfg.station, t) - r).normalized();
            s_I[i] = (sun_position_eci(t) - r).normalized();
        }

        for (int k = 0; k < cfg.tracklets_per_window; ++k) {
            std::seed_seq seq{seed_lo, seed_hi, std::uint32_t(w), std::uint32_t(k)};
            std::mt19937_64 rng(seq);
            const UnitQuaternion q0 = random_quaternion(rng);
            const Vec3 axis = random_unit(rng);
            double rate = cfg.omega_min;
            if (cfg.omega_max > cfg.omega_min) {
                std::uniform_real_distribution<double> u01(0.0, 1.0);
                rate = sample_omega_magnitude(u01(rng), cfg.omega_min, cfg.omega_max);
            }
            const Vec3 omega = rate * axis;

            Tracklet trk;
            trk.times = times;
            trk.v_I = v_I;
            trk.s_I = s_I;
            std::vector<Vec3> rates;
            std::optional<AttitudeHistory> hist;
            if (cfg.dynamics == Dynamics::FixedAxis) {
                hist = fixed_axis_history(q0, omega, times);
                rates.assign(times.size(), omega);
            } else {
                auto traj = propagate_torque_free_with_rates(*inertia, q0, {omega, Frame::BI}, times);
                hist = std::move(traj.history);
                rates = std::move(traj.omega_bi);
            }
            trk.spectra = replay_spectra(object, *hist, v_I, s_I);
            if (cfg.noise_sigma > 0) {
                std::normal_distribution<double> noise(0.0, cfg.noise_sigma);
                for (auto& s : trk.spectra)
                    for (Eigen::Index c = 0; c < s.size(); ++c) s[c] += noise(rng);
            }
            trk.truth = TrackletTruth{{hist->quats().begin(), hist->quats().end()}, rates[trk.mid_index()]};
            trk.validate();
            out.push_back(std::move(trk));
        }
    }
    return out;
}

OrbitElements representative_leo(double epoch) {
    OrbitElements el;
    el.semi_major_axis_km = 6920.0;
    el.eccentricity = 1e-4;
    el.inclination = 53.0 * kDeg;
    el.raan = 120.0 * kDeg;
    el.arg_perigee = 90.0 * kDeg;
    el.mean_anomaly = 0.0;
    el.epoch = epoch;
    return el;
}

GroundStation glasgow() { return {55.8642 * kDeg, -4.2518 * kDeg, 0.05}; }

DatasetConfig dataset1_config(double t_start, double t_end, std::uint64_t seed) {
    DatasetConfig cfg;
    cfg.orbit = representative_leo(t_start);
    cfg.station = glasgow();
    cfg.t_start = t_start;
    cfg.t_end = t_end;
    cfg.dynamics = Dynamics::FixedAxis;
    cfg.omega_min = cfg.omega_max = 2.0 * kRpm;
    cfg.seed = seed;
    return cfg;
}

DatasetConfig dataset2_config(int inertia, double t_start, double t_end, std::uint64_t seed) {
    DatasetConfig cfg = dataset1_config(t_start, t_end, seed);
    cfg.dynamics = Dynamics::TorqueFree;
    cfg.inertia = inertia;
    cfg.omega_min = 0.5 * kRpm;
    cfg.omega_max = 2.0 * kRpm;
    return cfg;
}

}  // namespace lcinv::sim
