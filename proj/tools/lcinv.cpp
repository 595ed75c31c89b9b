// lcinv: command-line front end.
//
// Exit codes: 0 ok, 2 config/argument error, 3 data error, 4 non-convergence.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lcinv/core_math.hpp"
#include "lcinv/errors.hpp"
#include "lcinv/evaluation.hpp"
#include "lcinv/facet_model.hpp"
#include "lcinv/inversion_ddp.hpp"
#include "lcinv/inversion_ls.hpp"
#include "lcinv/io.hpp"
#include "lcinv/pdm.hpp"
#include "lcinv/scenario_sim.hpp"
#include "lcinv/symmetry.hpp"

namespace fs = std::filesystem;
using namespace lcinv;
using io::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNoConvergence = 4;

constexpr std::size_t kMlLength = 200;

struct Globals {
    std::optional<std::uint64_t> seed;
    int workers = 1;
};

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

json quat_json(const UnitQuaternion& q) { return json::array({q.w(), q.x(), q.y(), q.z()}); }

sim::Tracklet load_tracklet(const std::string& path) { return io::tracklet_from_json(io::read_json_file(path)); }

void write_json(const std::string& path, const json& j) { io::write_text_file(path, j.dump(2) + "\n"); }

// Estimates are either bare history JSON or a result file with a "history" block.
AttitudeHistory load_estimate(const std::string& path) {
    const json j = io::read_json_file(path);
    if (j.is_object() && j.contains("history")) return io::history_from_json(j.at("history"));
    return io::history_from_json(j);
}

std::vector<double> resolve_periods(const std::vector<double>& given, const std::string& pdm_path,
                                    const sim::Tracklet& t, int workers) {
    if (!given.empty()) {
        for (double p : given)
            if (!(p > 0)) throw ConfigError("--period values must be positive");
        return given;
    }
    if (!pdm_path.empty()) {
        const json j = io::read_json_file(pdm_path);
        const json& list = j.is_object() && j.contains("candidates") ? j.at("candidates") : j;
        if (!list.is_array() || list.empty()) throw DataError("'" + pdm_path + "': expected a non-empty candidate list");
        std::vector<double> out;
        for (std::size_t i = 0; i < list.size(); ++i) {
            if (!list[i].is_object() || !list[i].contains("period_s") || !list[i]["period_s"].is_number())
                throw DataError("'" + pdm_path + "': candidate " + std::to_string(i) + " lacks 'period_s'");
            out.push_back(list[i]["period_s"].get<double>());
        }
        return out;
    }
    return pdm::estimate_period(t, 20, 2000, workers).periods;
}

// ---- simulate ---------------------------------------------------------------

struct SimulateArgs {
    std::string config;
    std::string out;
    bool csv = false;
};

int cmd_simulate(const SimulateArgs& a, const Globals& g) {
    json cfg_json;
    try {
        cfg_json = io::read_json_file(a.config);
    } catch (const DataError& e) {
        throw ConfigError(e.what());
    }
    io::SimulateConfig cfg = io::simulate_config_from_json(cfg_json);
    if (g.seed) cfg.dataset.seed = *g.seed;
    const facet::FacetObject obj = io::load_object(cfg.object);

    const auto tracklets = sim::generate_dataset(cfg.dataset, obj);
    fs::create_directories(a.out);
    json files = json::array();
    std::size_t samples = 0;
    for (std::size_t i = 0; i < tracklets.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "tracklet_%04zu", i);
        write_json((fs::path(a.out) / (std::string(name) + ".json")).string(), io::tracklet_to_json(tracklets[i]));
        if (a.csv) io::write_text_file((fs::path(a.out) / (std::string(name) + ".csv")).string(), io::tracklet_csv(tracklets[i]));
        files.push_back(std::string(name) + ".json");
        samples += tracklets[i].size();
    }
    json manifest;
    manifest["seed"] = cfg.dataset.seed;
    manifest["config_hash"] = io::config_hash(cfg);
    manifest["config"] = io::simulate_config_to_json(cfg);
    manifest["counts"] = {{"tracklets", tracklets.size()}, {"samples", samples}};
    manifest["files"] = files;
    write_json((fs::path(a.out) / "manifest.json").string(), manifest);
    std::cout << "wrote " << tracklets.size() << " tracklets to " << a.out << " (config " << io::config_hash(cfg)
              << ")\n";
    return kExitOk;
}

// ---- pdm --------------------------------------------------------------------------

struct PdmArgs {
    std::string tracklet;
    std::string out;
    std::string curve_csv;
    int bins = 20;
    int grid = 2000;
};

int cmd_pdm(const PdmArgs& a, const Globals& g) {
    const sim::Tracklet t = load_tracklet(a.tracklet);
    const Eigen::MatrixXd d = pdm::detrend(t);
    const auto trials = pdm::default_trial_grid(t.times, a.grid);
    const auto res = pdm::pdm_scan(t.times, d, trials, a.bins, g.workers);
    json list = json::array();
    for (std::size_t i = 0; i < res.periods.size(); ++i)
        list.push_back({{"period_s", res.periods[i]}, {"dispersion", res.dispersions[i]}});
    if (!a.curve_csv.empty()) {
        const auto c = pdm::dispersion_curve(t.times, d, trials, a.bins, g.workers);
        std::ostringstream os;
        os.precision(17);
        os << "period_s,dispersion\n";
        for (std::size_t i = 0; i < c.periods.size(); ++i) os << c.periods[i] << ',' << c.values[i] << '\n';
        io::write_text_file(a.curve_csv, os.str());
    }
    if (a.out.empty()) std::cout << list.dump(2) << "\n";
    else write_json(a.out, list);
    return kExitOk;
}

// ---- invert-ls --------------------------------------------------------------------

struct LsArgs {
    std::string tracklet;
    std::string object = "cube";
    std::string out;
    std::vector<double> periods;
    std::string pdm;
    double eta = 1.0;
    int attitudes = 128;
    int axes = 64;
    std::string euler_csv;
    std::string replay_csv;
};

int cmd_invert_ls(const LsArgs& a, const Globals& g) {
    const sim::Tracklet t = load_tracklet(a.tracklet);
    const facet::FacetObject obj = io::load_object(a.object);
    if (a.eta < 0) throw ConfigError("--eta must be non-negative");
    const auto periods = resolve_periods(a.periods, a.pdm, t, g.workers);

    ls::FixedAxisOptions fo;
    fo.attitude_samples = a.attitudes;
    fo.axis_samples = a.axes;
    fo.workers = g.workers;
    if (g.seed) fo.seed = *g.seed;
    ls::LsOptions lo;
    lo.eta = a.eta;
    lo.workers = g.workers;
    const auto r = ls::invert(t, obj, periods, fo, lo);
    const auto& s = r.solution;

    json j;
    j["method"] = "regularized_ls";
    j["history"] = io::history_to_json(s.history);
    j["losses"] = {{"measurement", s.measurement_loss}, {"j_alpha", s.j_alpha}, {"total", s.total_loss}, {"eta", a.eta}};
    j["converged"] = s.converged;
    j["iterations"] = s.iterations;
    j["seed_index"] = s.seed_index;
    j["seed_losses"] = s.seed_losses;
    j["guess"] = {{"period_s", r.guess.period},
                  {"q0", quat_json(r.guess.q0)},
                  {"omega_bi", vec_json(r.guess.omega)},
                  {"grid_best_cost", r.guess.grid_best_cost},
                  {"cost", r.guess.cost}};
    j["periods_tried"] = periods;
    write_json(a.out, j);
    if (!a.euler_csv.empty()) io::write_text_file(a.euler_csv, eval::euler_csv(s.history));
    if (!a.replay_csv.empty()) io::write_text_file(a.replay_csv, eval::replay_csv(s.history, t, obj));
    std::cout << "L = " << s.total_loss << " (E = " << s.measurement_loss << ", J_alpha = " << s.j_alpha << "), "
              << (s.converged ? "converged" : "NOT converged") << " after " << s.iterations << " iterations\n";
    return s.converged ? kExitOk : kExitNoConvergence;
}

// ---- invert-ddp ------------------------------------------------------------------

struct DdpArgs {
    std::string tracklet;
    std::string object = "cube";
    std::string out;
    int initial_count = 512;
    double eta = 1.0;
    std::optional<double> eta_alpha;
    long max_pops = 1000000;
    int ddp_iterations = 10;
    std::string euler_csv;
    std::string replay_csv;
};

int cmd_invert_ddp(const DdpArgs& a, const Globals& g) {
    const sim::Tracklet t = load_tracklet(a.tracklet);
    const facet::FacetObject obj = io::load_object(a.object);
    ddp::BestFirstOptions o;
    o.initial_count = a.initial_count;
    o.eta = a.eta;
    o.eta_alpha = a.eta_alpha;
    o.max_pops = a.max_pops;
    o.ddp.max_iterations = a.ddp_iterations;
    if (g.seed) o.seed = *g.seed;
    if (o.initial_count < 1) throw ConfigError("--initial-count must be >= 1");
    if (o.max_pops < 1) throw ConfigError("--max-pops must be >= 1");
    const auto r = ddp::best_first_invert(t, obj, o);

    json j;
    j["method"] = "ddp_best_first";
    if (r.history) {
        j["history"] = io::history_to_json(*r.history);
    } else {
        json partial = json::array();
        for (const auto& s : r.node.states) partial.push_back(quat_json(s.q));
        j["partial_quats"] = partial;
    }
    j["losses"] = {{"measurement", r.losses.measurement}, {"control", r.losses.control}, {"total", r.losses.total()}};
    j["success"] = r.success;
    json hist = json::array();
    for (std::size_t n = 0; n < r.expansions_by_length.size(); ++n)
        if (r.expansions_by_length[n] > 0) hist.push_back({{"length", n}, {"expansions", r.expansions_by_length[n]}});
    j["diagnostics"] = {{"pops", r.pops}, {"node_length", r.node.size()}, {"expansions_by_length", hist}};
    write_json(a.out, j);
    if (r.history && !a.euler_csv.empty()) io::write_text_file(a.euler_csv, eval::euler_csv(*r.history));
    if (r.history && !a.replay_csv.empty()) io::write_text_file(a.replay_csv, eval::replay_csv(*r.history, t, obj));
    std::cout << "V = " << r.losses.total() << " after " << r.pops << " pops, "
              << (r.success ? "full trajectory" : "pop cap reached") << "\n";
    return r.success ? kExitOk : kExitNoConvergence;
}

// ---- evaluate -----------------------------------------------------------------------

struct EvalArgs {
    std::string tracklet;
    std::string object = "cube";
    std::string estimate;
    std::string out;
    std::string table;
    std::string euler_csv;
    std::string replay_csv;
};

int cmd_evaluate(const EvalArgs& a, const Globals&) {
    const sim::Tracklet t = load_tracklet(a.tracklet);
    const facet::FacetObject obj = io::load_object(a.object);
    const AttitudeHistory est = load_estimate(a.estimate);
    if (!t.truth) throw DataError("tracklet '" + a.tracklet + "' has no 'truth' block; cannot evaluate");
    eval::EvalReport rep = eval::evaluate_tracklet(est, t, obj);
    {
        const json src = io::read_json_file(a.estimate);
        if (src.is_object() && src.contains("method") && src["method"].is_string()) rep.method = src["method"];
        if (src.is_object() && src.contains("converged") && src["converged"].is_boolean()) rep.converged = src["converged"];
        if (src.is_object() && src.contains("success") && src["success"].is_boolean()) rep.converged = src["success"];
    }
    json rows = json::array();
    for (const auto& row : rep.rows)
        rows.push_back({{"t_h", sym::label_name(row.t_h)}, {"t_b", row.t_b}, {"rms_deg", row.rms_deg}});
    const auto& best = rep.best_row();
    json j;
    j["method"] = rep.method;
    j["rows"] = rows;
    j["best"] = {{"index", rep.best}, {"t_h", sym::label_name(best.t_h)}, {"t_b", best.t_b}, {"rms_deg", best.rms_deg}};
    j["replay_residual"] = rep.replay_residual;
    j["converged"] = rep.converged;
    const std::string table = eval::report_table(rep);
    if (!a.out.empty()) write_json(a.out, j);
    if (!a.table.empty()) io::write_text_file(a.table, table);
    if (!a.euler_csv.empty()) io::write_text_file(a.euler_csv, eval::euler_csv(est));
    if (!a.replay_csv.empty()) io::write_text_file(a.replay_csv, eval::replay_csv(est, t, obj));
    std::cout << table;
    return kExitOk;
}

// ---- scan -----------------------------------------------------------------------------

struct ScanArgs {
    std::string object = "cube";
    std::string out;
    std::string tracklet;
    int sample = -1;
    std::vector<double> angles_deg;  // theta, phi, psi of a synthetic observation
    double alpha_deg = 32.0;
    int theta_steps = 181;
    int phi_steps = 91;
    int psi_samples = 64;
};

int cmd_scan(const ScanArgs& a, const Globals& g) {
    const facet::FacetObject obj = io::load_object(a.object);
    facet::Spectrum observed;
    double alpha = a.alpha_deg * kDeg;
    if (!a.tracklet.empty()) {
        const sim::Tracklet t = load_tracklet(a.tracklet);
        const std::size_t i = a.sample < 0 ? t.mid_index() : std::size_t(a.sample);
        if (i >= t.size()) throw ConfigError("--sample " + std::to_string(a.sample) + " is outside the tracklet");
        observed = t.spectra[i];
        alpha = phase_angle(t.v_I[i], t.s_I[i]);
    } else {
        if (a.angles_deg.size() != 3) throw ConfigError("scan needs --tracklet or --angles THETA PHI PSI (deg)");
        const auto [v, s] = sym::euler_view_sun(a.angles_deg[0] * kDeg, a.angles_deg[1] * kDeg, a.angles_deg[2] * kDeg, alpha);
        observed = facet::lambert_spectrum(obj, v, s);
    }
    if (a.theta_steps < 2 || a.phi_steps < 2 || a.psi_samples < 1) throw ConfigError("scan grid sizes too small");
    const auto theta = sym::linspace(-kPi, kPi, a.theta_steps);
    const auto phi = sym::linspace(-0.5 * kPi, 0.5 * kPi, a.phi_steps);
    const auto surf = sym::cost_surface_scan(obj, observed, alpha, theta, phi, a.psi_samples, g.workers);
    io::write_text_file(a.out, sym::cost_surface_csv(surf));
    Eigen::Index r = 0, c = 0;
    const double best = surf.cost.minCoeff(&r, &c);
    std::cout << "min cost " << best << " at theta = " << theta[c] / kDeg << " deg, phi = " << phi[r] / kDeg
              << " deg\n";
    return kExitOk;
}

// ---- export-ml ---------------------------------------------------------------------

struct ExportArgs {
    std::vector<std::string> tracklets;
    std::string manifest;
    std::string out;
};

// Targets at the crop midpoint: omega_BI, omega_IB and the H-frame forms.
std::vector<double> ml_targets(const sim::Tracklet& t) {
    const std::size_t m = t.mid_index();
    const Vec3 w_bi = t.truth->omega_bi_mid;
    FrameContext ctx;
    ctx.r_bi = to_matrix(t.truth->quats[m]);
    const Vec3 w_ib = omega_convert({w_bi, Frame::BI}, Frame::IB, ctx).value;
    const Mat3 r_ih = h_frame(t.v_I[m], t.s_I[m]);
    const double dt = t.times[m] - t.times[m - 1];
    const Vec3 w_hi = omega_hi(t.geometry(), t.times[m], dt).value;
    const auto tg = sym::omega_bh_targets(w_bi, r_ih, w_hi);
    std::vector<double> out;
    for (const Vec3& v : {w_bi, w_ib, tg.w_BH, tg.w_BH_S, tg.abs_w_BH, tg.abs_w_BI})
        out.insert(out.end(), {v.x(), v.y(), v.z()});
    return out;
}

int cmd_export_ml(const ExportArgs& a, const Globals&) {
    std::vector<std::string> paths = a.tracklets;
    if (!a.manifest.empty()) {
        const json m = io::read_json_file(a.manifest);
        if (!m.is_object() || !m.contains("files") || !m["files"].is_array())
            throw DataError("'" + a.manifest + "': missing 'files' list");
        const fs::path dir = fs::path(a.manifest).parent_path();
        for (const auto& f : m["files"]) {
            if (!f.is_string()) throw DataError("'" + a.manifest + "': 'files' entries must be strings");
            paths.push_back((dir / f.get<std::string>()).string());
        }
    }
    if (paths.empty()) throw ConfigError("export-ml needs --tracklets or --manifest");

    std::ostringstream os;
    os.precision(17);
    bool header = false;
    int channels = -1;
    std::size_t kept = 0;
    json rejected = json::array();
    for (const auto& p : paths) {
        const sim::Tracklet full = load_tracklet(p);
        if (!full.truth) throw DataError("tracklet '" + p + "' has no 'truth' block; targets unavailable");
        if (full.size() < kMlLength) {
            rejected.push_back({{"file", p}, {"samples", full.size()}});
            continue;
        }
        if (channels >= 0 && full.channels() != channels) throw DataError("tracklet '" + p + "' has a different channel count");
        channels = full.channels();
        const sim::Tracklet t = full.slice((full.size() - kMlLength) / 2, kMlLength);
        if (!header) {
            os << "tracklet";
            for (std::size_t i = 0; i < kMlLength; ++i) {
                for (int k = 0; k < channels; ++k) os << ",S" << i << '_' << k;
                for (const char* c : {"x", "y", "z"}) os << ",v" << i << '_' << c;
                for (const char* c : {"x", "y", "z"}) os << ",s" << i << '_' << c;
            }
            for (const char* n : {"w_bi", "w_ib", "w_bh", "w_bh_s", "abs_w_bh", "abs_w_bi"})
                for (const char* c : {"x", "y", "z"}) os << ',' << n << '_' << c;
            os << '\n';
            header = true;
        }
        os << fs::path(p).filename().string();
        for (std::size_t i = 0; i < kMlLength; ++i) {
            for (int k = 0; k < channels; ++k) os << ',' << t.spectra[i][k];
            for (int c = 0; c < 3; ++c) os << ',' << t.v_I[i][c];
            for (int c = 0; c < 3; ++c) os << ',' << t.s_I[i][c];
        }
        for (double y : ml_targets(t)) os << ',' << y;
        os << '\n';
        ++kept;
    }
    if (kept == 0) throw DataError("export-ml: no tracklet has at least " + std::to_string(kMlLength) + " samples");
    io::write_text_file(a.out, os.str());
    for (const auto& r : rejected)
        std::cerr << "skipped " << r["file"].get<std::string>() << " (" << r["samples"].get<std::size_t>()
                  << " samples < " << kMlLength << ")\n";
    std::cout << "wrote " << kept << " rows to " << a.out << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral lightcurve attitude inversion toolkit"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    std::uint64_t seed = 0;
    auto* seed_opt = app.add_option("--seed", seed, "Seed for every stochastic step");
    app.add_option("--workers", g.workers, "Worker threads (1 = deterministic)")->check(CLI::PositiveNumber);

    SimulateArgs sa;
    auto* sim_cmd = app.add_subcommand("simulate", "Generate tracklets from a scenario config");
    sim_cmd->add_option("--config", sa.config, "Scenario config JSON")->required();
    sim_cmd->add_option("--out", sa.out, "Output directory")->required();
    sim_cmd->add_flag("--csv", sa.csv, "Also write one CSV per tracklet");

    PdmArgs pa;
    auto* pdm_cmd = app.add_subcommand("pdm", "Period candidates by phase dispersion minimization");
    pdm_cmd->add_option("--tracklet", pa.tracklet)->required();
    pdm_cmd->add_option("--out", pa.out, "Candidate JSON (stdout if omitted)");
    pdm_cmd->add_option("--curve-csv", pa.curve_csv, "Dispersion curve CSV");
    pdm_cmd->add_option("--bins", pa.bins)->check(CLI::Range(4, 100000));
    pdm_cmd->add_option("--grid", pa.grid, "Trial periods")->check(CLI::Range(2, 10000000));

    LsArgs la;
    auto* ls_cmd = app.add_subcommand("invert-ls", "Fixed-axis guess plus regularized least squares");
    ls_cmd->add_option("--tracklet", la.tracklet)->required();
    ls_cmd->add_option("--object", la.object, "cube | cube_xz | capsule | object JSON");
    ls_cmd->add_option("--out", la.out)->required();
    ls_cmd->add_option("--period", la.periods, "Period candidate(s), s");
    ls_cmd->add_option("--pdm", la.pdm, "Candidate JSON from the pdm subcommand");
    ls_cmd->add_option("--eta", la.eta);
    ls_cmd->add_option("--attitudes", la.attitudes)->check(CLI::PositiveNumber);
    ls_cmd->add_option("--axes", la.axes)->check(CLI::PositiveNumber);
    ls_cmd->add_option("--euler-csv", la.euler_csv);
    ls_cmd->add_option("--replay-csv", la.replay_csv);

    DdpArgs da;
    double eta_alpha = 0;
    auto* ddp_cmd = app.add_subcommand("invert-ddp", "Best-first search over DDP trajectories");
    ddp_cmd->add_option("--tracklet", da.tracklet)->required();
    ddp_cmd->add_option("--object", da.object);
    ddp_cmd->add_option("--out", da.out)->required();
    ddp_cmd->add_option("--initial-count", da.initial_count);
    ddp_cmd->add_option("--eta", da.eta);
    auto* eta_alpha_opt = ddp_cmd->add_option("--eta-alpha", eta_alpha, "Control weight (default 10 eta dt)");
    ddp_cmd->add_option("--max-pops", da.max_pops);
    ddp_cmd->add_option("--ddp-iterations", da.ddp_iterations)->check(CLI::PositiveNumber);
    ddp_cmd->add_option("--euler-csv", da.euler_csv);
    ddp_cmd->add_option("--replay-csv", da.replay_csv);

    EvalArgs ea;
    auto* eval_cmd = app.add_subcommand("evaluate", "RMS(theta) against the ground-truth symmetry set");
    eval_cmd->add_option("--tracklet", ea.tracklet)->required();
    eval_cmd->add_option("--object", ea.object);
    eval_cmd->add_option("--estimate", ea.estimate, "History JSON or inversion result")->required();
    eval_cmd->add_option("--out", ea.out);
    eval_cmd->add_option("--table", ea.table);
    eval_cmd->add_option("--euler-csv", ea.euler_csv);
    eval_cmd->add_option("--replay-csv", ea.replay_csv);

    ScanArgs sc;
    auto* scan_cmd = app.add_subcommand("scan", "Single-spectrum cost surface over H-frame angles");
    scan_cmd->add_option("--object", sc.object);
    scan_cmd->add_option("--out", sc.out, "CSV")->required();
    scan_cmd->add_option("--tracklet", sc.tracklet);
    scan_cmd->add_option("--sample", sc.sample, "Sample index (default: middle)");
    scan_cmd->add_option("--angles", sc.angles_deg, "theta phi psi of a synthetic observation, deg")->expected(3);
    scan_cmd->add_option("--alpha", sc.alpha_deg, "Phase angle for --angles, deg");
    scan_cmd->add_option("--theta-steps", sc.theta_steps);
    scan_cmd->add_option("--phi-steps", sc.phi_steps);
    scan_cmd->add_option("--psi-samples", sc.psi_samples);

    ExportArgs xa;
    auto* ml_cmd = app.add_subcommand("export-ml", "Fixed-length 200-sample matrices with angular-velocity targets");
    ml_cmd->add_option("--tracklets", xa.tracklets);
    ml_cmd->add_option("--manifest", xa.manifest, "manifest.json written by simulate");
    ml_cmd->add_option("--out", xa.out, "CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }
    if (*seed_opt) g.seed = seed;
    if (*eta_alpha_opt) da.eta_alpha = eta_alpha;

    try {
        if (*sim_cmd) return cmd_simulate(sa, g);
        if (*pdm_cmd) return cmd_pdm(pa, g);
        if (*ls_cmd) return cmd_invert_ls(la, g);
        if (*ddp_cmd) return cmd_invert_ddp(da, g);
        if (*eval_cmd) return cmd_evaluate(ea, g);
        if (*scan_cmd) return cmd_scan(sc, g);
        if (*ml_cmd) return cmd_export_ml(xa, g);
    } catch (const ArgumentError& e) {  // includes ConfigError
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const DegenerateGeometryError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const NumericalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNoConvergence;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitConfig;
}
