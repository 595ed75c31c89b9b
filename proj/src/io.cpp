#include "lcinv/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace lcinv::io {

namespace {

Vec3 vec3(const json& j, const std::string& field) {
    if (!j.is_array() || j.size() != 3) throw DataError("'" + field + "' must be a 3-element array");
    Vec3 v;
    for (int k = 0; k < 3; ++k) {
        if (!j[k].is_number()) throw DataError("'" + field + "' must contain numbers");
        v[k] = j[k].get<double>();
    }
    return v;
}

Eigen::VectorXd vecx(const json& j, const std::string& field) {
    if (!j.is_array()) throw DataError("'" + field + "' must be an array");
    Eigen::VectorXd v(j.size());
    for (std::size_t k = 0; k < j.size(); ++k) {
        if (!j[k].is_number()) throw DataError("'" + field + "' must contain numbers");
        v[Eigen::Index(k)] = j[k].get<double>();
    }
    return v;
}

json arr(const Eigen::VectorXd& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }
json arr(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

const json& need(const json& j, const std::string& key, const std::string& where) {
    if (!j.is_object() || !j.contains(key)) throw DataError(where + ": missing field '" + key + "'");
    return j.at(key);
}

std::vector<Vec3> vec3_list(const json& j, const std::string& field) {
    if (!j.is_array()) throw DataError("'" + field + "' must be an array");
    std::vector<Vec3> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(vec3(j[i], field + "[" + std::to_string(i) + "]"));
    return out;
}

std::vector<UnitQuaternion> quat_list(const json& j, const std::string& field) {
    if (!j.is_array()) throw DataError("'" + field + "' must be an array");
    std::vector<UnitQuaternion> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const Eigen::VectorXd q = vecx(j[i], field + "[" + std::to_string(i) + "]");
        if (q.size() != 4) throw DataError("'" + field + "' entries must have 4 components");
        try {
            out.push_back(UnitQuaternion(q[0], q[1], q[2], q[3]));
        } catch (const ArgumentError&) {
            throw DataError("'" + field + "[" + std::to_string(i) + "]' is a zero quaternion");
        }
    }
    return out;
}

json quats_json(std::span<const UnitQuaternion> q) {
    json out = json::array();
    for (const auto& x : q) out.push_back({x.w(), x.x(), x.y(), x.z()});
    return out;
}

template <class T>
T get_as(const json& j, const std::string& key) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config key '" + key + "' has the wrong type");
    }
}

// ISO UTC string or seconds since J2000.
double get_time(const json& j, const std::string& key) {
    if (j.at(key).is_number()) return j.at(key).get<double>();
    try {
        return sim::parse_utc(get_as<std::string>(j, key));
    } catch (const ArgumentError& e) {
        throw ConfigError("config key '" + key + "': " + e.what());
    }
}

}  // namespace

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw DataError("'" + path + "' is not valid JSON: " + e.what());
    }
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << text;
    if (!out) throw DataError("write failed for '" + path + "'");
}

json object_to_json(const facet::FacetObject& obj) {
    json facets = json::array();
    for (const auto& f : obj.facets()) {
        json jf{{"normal", arr(f.normal)}, {"colour", arr(f.colour)}};
        if (!f.vertices.empty()) {
            json vs = json::array();
            for (const auto& v : f.vertices) vs.push_back(arr(v));
            jf["vertices"] = vs;
        }
        facets.push_back(jf);
    }
    json syms = json::array();
    for (const auto& m : obj.symmetry_group()) {
        json row = json::array();
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) row.push_back(m(r, c));
        syms.push_back(row);
    }
    return {{"channels", obj.channels()}, {"facets", facets}, {"symmetries", syms}};
}

facet::FacetObject object_from_json(const json& j) {
    const json& jf = need(j, "facets", "object");
    if (!jf.is_array()) throw DataError("object: 'facets' must be an array");
    std::vector<facet::Facet> facets;
    for (std::size_t i = 0; i < jf.size(); ++i) {
        const std::string at = "facets[" + std::to_string(i) + "]";
        facet::Facet f;
        f.normal = vec3(need(jf[i], "normal", at), at + ".normal");
        f.colour = vecx(need(jf[i], "colour", at), at + ".colour");
        if (jf[i].contains("vertices")) f.vertices = vec3_list(jf[i]["vertices"], at + ".vertices");
        facets.push_back(std::move(f));
    }
    if (j.contains("channels") && !facets.empty() && j["channels"].get<int>() != facets.front().colour.size()) {
        throw DataError("object: 'channels' disagrees with colour length");
    }
    std::vector<Mat3> syms;
    if (j.contains("symmetries")) {
        for (std::size_t i = 0; i < j["symmetries"].size(); ++i) {
            const Eigen::VectorXd m = vecx(j["symmetries"][i], "symmetries[" + std::to_string(i) + "]");
            if (m.size() != 9) throw DataError("object: symmetries entries need 9 numbers");
            Mat3 r;
            r << m[0], m[1], m[2], m[3], m[4], m[5], m[6], m[7], m[8];
            syms.push_back(r);
        }
    }
    try {
        return facet::FacetObject(std::move(facets), std::move(syms));
    } catch (const ArgumentError& e) {
        throw DataError(std::string("object: ") + e.what());
    }
}

facet::FacetObject load_object(const std::string& name) {
    if (name == "cube") return facet::make_cube();
    if (name == "cube_xz") return facet::make_cube_xz_symmetric();
    if (name == "capsule") return facet::make_capsule();
    return object_from_json(read_json_file(name));
}

json tracklet_to_json(const sim::Tracklet& t) {
    json spectra = json::array(), v = json::array(), s = json::array();
    for (std::size_t i = 0; i < t.size(); ++i) {
        spectra.push_back(arr(t.spectra[i]));
        v.push_back(arr(t.v_I[i]));
        s.push_back(arr(t.s_I[i]));
    }
    json j{{"times", t.times}, {"spectra", spectra}, {"v_I", v}, {"s_I", s}};
    if (t.truth) j["truth"] = {{"quats", quats_json(t.truth->quats)}, {"omega_BI_mid", arr(t.truth->omega_bi_mid)}};
    return j;
}

sim::Tracklet tracklet_from_json(const json& j) {
    sim::Tracklet t;
    const json& times = need(j, "times", "tracklet");
    if (!times.is_array()) throw DataError("'times' must be an array");
    for (const auto& x : times) {
        if (!x.is_number()) throw DataError("'times' must contain numbers");
        t.times.push_back(x.get<double>());
    }
    const json& spectra = need(j, "spectra", "tracklet");
    if (!spectra.is_array()) throw DataError("'spectra' must be an array");
    for (std::size_t i = 0; i < spectra.size(); ++i)
        t.spectra.push_back(vecx(spectra[i], "spectra[" + std::to_string(i) + "]"));
    t.v_I = vec3_list(need(j, "v_I", "tracklet"), "v_I");
    t.s_I = vec3_list(need(j, "s_I", "tracklet"), "s_I");
    if (j.contains("truth")) {
        const json& tr = j["truth"];
        sim::TrackletTruth truth;
        truth.quats = quat_list(need(tr, "quats", "truth"), "truth.quats");
        if (tr.contains("omega_BI_mid")) truth.omega_bi_mid = vec3(tr["omega_BI_mid"], "truth.omega_BI_mid");
        t.truth = std::move(truth);
    }
    t.validate();
    return t;
}

std::string tracklet_csv(const sim::Tracklet& t) {
    std::ostringstream os;
    os << std::setprecision(17) << 't';
    for (int c = 0; c < t.channels(); ++c) os << ",S_" << c;
    os << ",v_x,v_y,v_z,s_x,s_y,s_z";
    if (t.truth) os << ",q_w,q_x,q_y,q_z";
    os << '\n';
    for (std::size_t i = 0; i < t.size(); ++i) {
        os << t.times[i];
        for (int c = 0; c < t.channels(); ++c) os << ',' << t.spectra[i][c];
        for (int k = 0; k < 3; ++k) os << ',' << t.v_I[i][k];
        for (int k = 0; k < 3; ++k) os << ',' << t.s_I[i][k];
        if (t.truth) {
            const auto& q = t.truth->quats[i];
            os << ',' << q.w() << ',' << q.x() << ',' << q.y() << ',' << q.z();
        }
        os << '\n';
    }
    return os.str();
}

json history_to_json(const AttitudeHistory& h) {
    return {{"times", std::vector<double>(h.times().begin(), h.times().end())}, {"quats", quats_json(h.quats())}};
}

AttitudeHistory history_from_json(const json& j) {
    const json& times = need(j, "times", "history");
    std::vector<double> t;
    for (const auto& x : times) t.push_back(x.get<double>());
    auto q = quat_list(need(j, "quats", "history"), "quats");
    try {
        return AttitudeHistory(std::move(t), std::move(q));
    } catch (const ArgumentError& e) {
        throw DataError(std::string("history: ") + e.what());
    }
}

void check_keys(const json& j, const std::vector<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw ConfigError("unknown config key '" + (where.empty() ? key : where + "." + key) + "'");
        }
    }
}

SimulateConfig simulate_config_from_json(const json& j) {
    check_keys(j,
               {"recipe", "object", "start", "end", "seed", "orbit", "station", "dynamics", "inertia", "gamma",
                "omega_min_rpm", "omega_max_rpm", "tracklets_per_window", "samples", "sample_dt", "min_samples",
                "max_windows", "noise_sigma", "search_step", "min_elevation_deg"},
               "");
    if (!j.contains("start") || !j.contains("end")) throw ConfigError("config needs 'start' and 'end'");
    const double t0 = get_time(j, "start");
    const double t1 = get_time(j, "end");
    const std::uint64_t seed = j.contains("seed") ? get_as<std::uint64_t>(j, "seed") : 1;
    const std::string recipe = j.contains("recipe") ? get_as<std::string>(j, "recipe") : "dataset1";

    SimulateConfig c;
    if (recipe == "dataset1") {
        c.dataset = sim::dataset1_config(t0, t1, seed);
    } else if (recipe == "dataset1a") {
        c.dataset = sim::dataset1_config(t0, t1, seed);
        c.object = "cube_xz";
    } else if (recipe == "dataset2") {
        c.dataset = sim::dataset2_config(j.contains("inertia") ? get_as<int>(j, "inertia") : 2, t0, t1, seed);
    } else {
        throw ConfigError("config key 'recipe' must be dataset1, dataset1a or dataset2");
    }
    auto& d = c.dataset;
    if (j.contains("object")) c.object = get_as<std::string>(j, "object");
    if (j.contains("orbit")) {
        const json& o = j["orbit"];
        check_keys(o, {"a_km", "e", "i_deg", "raan_deg", "argp_deg", "mean_anomaly_deg", "epoch"}, "orbit");
        if (o.contains("a_km")) d.orbit.semi_major_axis_km = get_as<double>(o, "a_km");
        if (o.contains("e")) d.orbit.eccentricity = get_as<double>(o, "e");
        if (o.contains("i_deg")) d.orbit.inclination = get_as<double>(o, "i_deg") * kDeg;
        if (o.contains("raan_deg")) d.orbit.raan = get_as<double>(o, "raan_deg") * kDeg;
        if (o.contains("argp_deg")) d.orbit.arg_perigee = get_as<double>(o, "argp_deg") * kDeg;
        if (o.contains("mean_anomaly_deg")) d.orbit.mean_anomaly = get_as<double>(o, "mean_anomaly_deg") * kDeg;
        if (o.contains("epoch")) d.orbit.epoch = get_time(o, "epoch");
    }
    if (j.contains("station")) {
        const json& s = j["station"];
        check_keys(s, {"lat_deg", "lon_deg", "alt_km"}, "station");
        if (s.contains("lat_deg")) d.station.latitude = get_as<double>(s, "lat_deg") * kDeg;
        if (s.contains("lon_deg")) d.station.longitude = get_as<double>(s, "lon_deg") * kDeg;
        if (s.contains("alt_km")) d.station.altitude_km = get_as<double>(s, "alt_km");
    }
    if (j.contains("dynamics")) {
        const auto dyn = get_as<std::string>(j, "dynamics");
        if (dyn == "fixed_axis") d.dynamics = sim::Dynamics::FixedAxis;
        else if (dyn == "torque_free") d.dynamics = sim::Dynamics::TorqueFree;
        else throw ConfigError("config key 'dynamics' must be fixed_axis or torque_free");
    }
    if (j.contains("inertia")) d.inertia = get_as<int>(j, "inertia");
    if (j.contains("gamma")) d.gamma = get_as<double>(j, "gamma");
    if (j.contains("omega_min_rpm")) d.omega_min = get_as<double>(j, "omega_min_rpm") * kRpm;
    if (j.contains("omega_max_rpm")) d.omega_max = get_as<double>(j, "omega_max_rpm") * kRpm;
    if (j.contains("tracklets_per_window")) d.tracklets_per_window = get_as<int>(j, "tracklets_per_window");
    if (j.contains("samples")) d.samples = get_as<int>(j, "samples");
    if (j.contains("sample_dt")) d.sample_dt = get_as<double>(j, "sample_dt");
    if (j.contains("min_samples")) d.min_samples = get_as<int>(j, "min_samples");
    if (j.contains("max_windows")) d.max_windows = get_as<int>(j, "max_windows");
    if (j.contains("noise_sigma")) d.noise_sigma = get_as<double>(j, "noise_sigma");
    if (j.contains("search_step")) d.search_step = get_as<double>(j, "search_step");
    if (j.contains("min_elevation_deg")) d.min_elevation = get_as<double>(j, "min_elevation_deg") * kDeg;
    try {
        d.validate();
    } catch (const ArgumentError& e) {
        throw ConfigError(e.what());
    }
    return c;
}

json simulate_config_to_json(const SimulateConfig& c) {
    const auto& d = c.dataset;
    return {{"object", c.object},
            {"start", d.t_start},
            {"end", d.t_end},
            {"seed", d.seed},
            {"orbit",
             {{"a_km", d.orbit.semi_major_axis_km},
              {"e", d.orbit.eccentricity},
              {"i_deg", d.orbit.inclination / kDeg},
              {"raan_deg", d.orbit.raan / kDeg},
              {"argp_deg", d.orbit.arg_perigee / kDeg},
              {"mean_anomaly_deg", d.orbit.mean_anomaly / kDeg},
              {"epoch", d.orbit.epoch}}},
            {"station",
             {{"lat_deg", d.station.latitude / kDeg},
              {"lon_deg", d.station.longitude / kDeg},
              {"alt_km", d.station.altitude_km}}},
            {"dynamics", d.dynamics == sim::Dynamics::FixedAxis ? "fixed_axis" : "torque_free"},
            {"inertia", d.inertia},
            {"gamma", d.gamma},
            {"omega_min_rpm", d.omega_min / kRpm},
            {"omega_max_rpm", d.omega_max / kRpm},
            {"tracklets_per_window", d.tracklets_per_window},
            {"samples", d.samples},
            {"sample_dt", d.sample_dt},
            {"min_samples", d.min_samples},
            {"max_windows", d.max_windows},
            {"noise_sigma", d.noise_sigma},
            {"search_step", d.search_step},
            {"min_elevation_deg", d.min_elevation / kDeg}};
}

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string config_hash(const SimulateConfig& c) { return fnv1a_hex(simulate_config_to_json(c).dump()); }

}  // namespace lcinv::io
