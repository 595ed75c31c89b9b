#pragma once

// Synthetic observation tracklets: Keplerian orbit, ground-station
// visibility, attitude dynamics and the dataset recipes built on them.
//
// Times are seconds since J2000.0 (2000-01-01T12:00:00), UTC treated as
// uniform. Distances are km.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lcinv/core_math.hpp"
#include "lcinv/facet_model.hpp"

namespace lcinv::sim {

constexpr double kMuEarth = 398600.4418;     // km^3/s^2
constexpr double kEarthRadius = 6378.137;    // km, equatorial
constexpr double kEarthFlattening = 1.0 / 298.257223563;
constexpr double kAu = 149597870.7;          // km

/// Seconds since J2000.0 for a UTC calendar instant.
double utc_seconds(int year, int month, int day, int hour = 0, int minute = 0, double second = 0.0);
/// Parses "YYYY-MM-DD" or "YYYY-MM-DDTHH:MM:SS"; throws ArgumentError.
double parse_utc(const std::string& iso);

struct OrbitElements {
    double semi_major_axis_km = 0;
    double eccentricity = 0;
    double inclination = 0;  // rad
    double raan = 0;         // rad
    double arg_perigee = 0;  // rad
    double mean_anomaly = 0; // rad, at epoch
    double epoch = 0;        // s since J2000

    void validate() const;
    double mean_motion() const;
    double period() const;
};

struct StateVector {
    Vec3 position;  // km, ECI
    Vec3 velocity;  // km/s
};

/// Solves Kepler's equation by Newton iteration (tol 1e-12 rad, <= 50 iterations).
double solve_kepler(double mean_anomaly, double eccentricity);
StateVector propagate_kepler(const OrbitElements& el, double t);

struct GroundStation {
    double latitude = 0;   // rad, geodetic
    double longitude = 0;  // rad, east positive
    double altitude_km = 0;

    void validate() const;
};

/// Greenwich mean sidereal angle (rad); Earth rotation is a uniform spin about ECI z.
double gmst(double t);
Vec3 station_position_eci(const GroundStation& st, double t);
/// Local geodetic up direction in ECI.
Vec3 station_up_eci(const GroundStation& st, double t);

/// Unit sun direction from the Earth centre in ECI, low-precision analytic
/// ecliptic model (mean longitude and anomaly polynomials).
Vec3 sun_direction_eci(double t);
Vec3 sun_position_eci(double t);

using SunModel = std::function<Vec3(double)>;  // unit direction, ECI

/// Cylindrical umbra: shadowed iff behind the Earth along the anti-sun axis
/// and within one Earth radius of it.
bool in_earth_shadow(const Vec3& r_sat, const Vec3& sun_dir);
double elevation(const GroundStation& st, const Vec3& r_sat, double t);

struct Window {
    double start = 0;
    double end = 0;
    double duration() const { return end - start; }
};

/// True when all three observing conditions hold: elevation above
/// `min_elevation`, satellite sunlit, sun below the station horizon.
bool observable(const OrbitElements& el, const GroundStation& st, const SunModel& sun, double t,
                double min_elevation = 10.0 * kDeg);

/// Maximal intervals of observability, sampled at `step` and refined by
/// bisection; windows shorter than one step are dropped.
std::vector<Window> visibility_windows(const OrbitElements& el, const GroundStation& st, const SunModel& sun,
                                       double t_start, double t_end, double step,
                                       double min_elevation = 10.0 * kDeg);

class InertiaTensor {
public:
    /// Symmetric within 1e-12 and positive definite, else ArgumentError.
    explicit InertiaTensor(const Mat3& j);
    const Mat3& matrix() const { return j_; }
    const Mat3& inverse() const { return inv_; }

    static InertiaTensor spherical();                         // J1 = I
    static InertiaTensor prolate(const Mat3& r, double gamma);  // J2 = R diag(g,1,1) R^T
    static InertiaTensor oblate(const Mat3& r, double gamma);   // J3 = R diag(g,g,1) R^T

private:
    Mat3 j_;
    Mat3 inv_;
};

struct RigidBodyTrajectory {
    AttitudeHistory history;
    std::vector<Vec3> omega_bi;  // inertial-frame angular velocity at each sample
};

/// Torque-free Euler equations plus quaternion kinematics, RK4 with internal
/// step <= max_step (0.1 s cap). w0 is the inertial angular velocity at times[0].
RigidBodyTrajectory propagate_torque_free_with_rates(const InertiaTensor& j, const UnitQuaternion& q0,
                                                     const AngularVelocity& w0, const std::vector<double>& times,
                                                     double max_step = 0.02);
AttitudeHistory propagate_torque_free(const InertiaTensor& j, const UnitQuaternion& q0, const AngularVelocity& w0,
                                      const std::vector<double>& times);

/// Constant-rate rotation about a fixed inertial axis: q(t) = exp(w (t - t0)) q0.
AttitudeHistory fixed_axis_history(const UnitQuaternion& q0, const Vec3& omega_bi, const std::vector<double>& times);

/// Log-uniform rate: log|w| = u (log w_max - log w_min) + log w_min.
double sample_omega_magnitude(double u, double w_min, double w_max);

struct TrackletTruth {
    std::vector<UnitQuaternion> quats;
    Vec3 omega_bi_mid = Vec3::Zero();  // at sample index size()/2
};

struct Tracklet {
    std::vector<double> times;
    std::vector<facet::Spectrum> spectra;
    std::vector<Vec3> v_I;  // object -> observer
    std::vector<Vec3> s_I;  // object -> sun
    std::optional<TrackletTruth> truth;

    std::size_t size() const { return times.size(); }
    int channels() const { return spectra.empty() ? 0 : int(spectra.front().size()); }
    std::size_t mid_index() const { return times.size() / 2; }
    /// Throws DataError naming the offending field/sample.
    void validate() const;
    AttitudeHistory truth_history() const;
    /// Normalized linear interpolation of (v_I, s_I), clamped at the ends.
    GeometryFn geometry() const;
    /// Sample spacing if uniform within 1e-9 s, otherwise nullopt.
    std::optional<double> uniform_spacing() const;
    /// Samples [first, first + count).
    Tracklet slice(std::size_t first, std::size_t count) const;
};

/// Spectra of `object` along `history` for the tracklet's geometry.
std::vector<facet::Spectrum> replay_spectra(const facet::FacetObject& object, const AttitudeHistory& history,
                                            const std::vector<Vec3>& v_I, const std::vector<Vec3>& s_I);

enum class Dynamics { FixedAxis, TorqueFree };

struct DatasetConfig {
    OrbitElements orbit;
    GroundStation station;
    double t_start = 0;
    double t_end = 0;
    double search_step = 10.0;
    double min_elevation = 10.0 * kDeg;
    Dynamics dynamics = Dynamics::FixedAxis;
    int inertia = 1;        // 1, 2 or 3 (torque-free only)
    double gamma = 1.1;
    double omega_min = 2.0 * kRpm;  // rad/s; equal bounds give a fixed rate
    double omega_max = 2.0 * kRpm;
    int tracklets_per_window = 100;
    int samples = 200;
    double sample_dt = 1.0;
    int min_samples = 50;
    int max_windows = 0;    // 0: all windows
    double noise_sigma = 0.0;
    std::uint64_t seed = 1;

    void validate() const;
};

/// Tracklets for every visibility window, ground truth attached. Each
/// tracklet depends only on (seed, window index, tracklet index).
std::vector<Tracklet> generate_dataset(const DatasetConfig& cfg, const facet::FacetObject& object);

/// Representative LEO stand-in elements (a ~ 6920 km, e ~ 1e-4, i ~ 53 deg)
/// at the given epoch; not a real satellite's TLE.
OrbitElements representative_leo(double epoch);
GroundStation glasgow();
/// Fixed-axis, 2 RPM recipe over [t_start, t_end].
DatasetConfig dataset1_config(double t_start, double t_end, std::uint64_t seed);
/// Torque-free recipe with inertia option k and 0.5-2 RPM log-uniform rates.
DatasetConfig dataset2_config(int inertia, double t_start, double t_end, std::uint64_t seed);

}  // namespace lcinv::sim
