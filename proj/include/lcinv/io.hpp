#pragma once

// JSON/CSV formats for objects, tracklets, histories and run configs.
//
// Object:   {"channels": K, "facets": [{"normal": [x,y,z], "colour": [...],
//            "vertices": [[x,y,z], ...]}], "symmetries": [[9 numbers, row-major], ...]}
// Tracklet: {"times": [...], "spectra": [[K], ...], "v_I": [[3], ...], "s_I": [[3], ...],
//            "truth": {"quats": [[w,x,y,z], ...], "omega_BI_mid": [3]}}
// History:  {"times": [...], "quats": [[w,x,y,z], ...]}

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "lcinv/facet_model.hpp"
#include "lcinv/scenario_sim.hpp"

namespace lcinv::io {

using nlohmann::json;

json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

json object_to_json(const facet::FacetObject& obj);
facet::FacetObject object_from_json(const json& j);
/// "cube", "cube_xz", "capsule" or a path to an object JSON file.
facet::FacetObject load_object(const std::string& name_or_path);

json tracklet_to_json(const sim::Tracklet& t);
sim::Tracklet tracklet_from_json(const json& j);
std::string tracklet_csv(const sim::Tracklet& t);

json history_to_json(const AttitudeHistory& h);
AttitudeHistory history_from_json(const json& j);

struct SimulateConfig {
    sim::DatasetConfig dataset;
    std::string object = "cube";
};

/// Keys (all optional unless noted):
///   recipe            "dataset1" | "dataset1a" | "dataset2"   (defaults below follow it)
///   object            fixture name or object file path
///   start, end        ISO UTC or seconds since J2000, required
///   seed              integer
///   orbit             {a_km, e, i_deg, raan_deg, argp_deg, mean_anomaly_deg, epoch}
///   station           {lat_deg, lon_deg, alt_km}
///   dynamics          "fixed_axis" | "torque_free"
///   inertia           1 | 2 | 3
///   gamma, omega_min_rpm, omega_max_rpm, tracklets_per_window, samples,
///   sample_dt, min_samples, max_windows, noise_sigma, search_step,
///   min_elevation_deg
/// Unknown keys raise ConfigError naming the key.
SimulateConfig simulate_config_from_json(const json& j);
/// Fully expanded form (every field explicit, same keys and units as the
/// input), used for hashing and accepted back by simulate_config_from_json.
json simulate_config_to_json(const SimulateConfig& c);

/// FNV-1a 64 of the canonical dump, as 16 hex digits.
std::string fnv1a_hex(const std::string& text);
std::string config_hash(const SimulateConfig& c);

/// Rejects keys outside `allowed` with ConfigError("unknown config key '<k>'").
void check_keys(const json& j, const std::vector<std::string>& allowed, const std::string& where);

}  // namespace lcinv::io
