#include <doctest.h>

#include <filesystem>

#include "helpers.hpp"
#include "lcinv/io.hpp"

using namespace lcinv;
using namespace lcinv::io;

namespace {

json base_config() {
    return json{{"recipe", "dataset1"}, {"start", "2022-01-10"}, {"end", "2022-01-12"}, {"seed", 5}};
}

}  // namespace

TEST_CASE("FNV-1a reference values") {
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
    CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
    CHECK(fnv1a_hex("foobar") == "85944171f73967e8");
}

TEST_CASE("object round trip") {
    for (const auto& obj : {facet::make_cube(), facet::make_cube_xz_symmetric(), facet::make_capsule()}) {
        const auto back = object_from_json(json::parse(object_to_json(obj).dump()));
        REQUIRE(back.facet_count() == obj.facet_count());
        CHECK(back.channels() == obj.channels());
        CHECK(back.symmetry_group().size() == obj.symmetry_group().size());
        for (std::size_t i = 0; i < obj.facet_count(); ++i) {
            CHECK(back.facets()[i].normal == obj.facets()[i].normal);
            CHECK(back.facets()[i].colour == obj.facets()[i].colour);
            CHECK(back.facets()[i].vertices.size() == obj.facets()[i].vertices.size());
        }
    }
    CHECK(load_object("cube").channels() == 6);
    CHECK(load_object("cube_xz").channels() == 5);
    CHECK_THROWS(load_object("/nonexistent/object.json"));
    json bad = object_to_json(facet::make_cube());
    bad["facets"][0]["normal"] = json::array({1, 0});
    CHECK_THROWS_AS(object_from_json(bad), DataError);
}

TEST_CASE("tracklet and history round trips") {
    const auto& trk = testutil::dataset1_fixture().front();
    const auto back = tracklet_from_json(json::parse(tracklet_to_json(trk).dump()));
    CHECK(back.times == trk.times);
    REQUIRE(back.size() == trk.size());
    for (std::size_t i = 0; i < trk.size(); ++i) {
        CHECK(back.spectra[i] == trk.spectra[i]);
        CHECK(back.v_I[i] == trk.v_I[i]);
        CHECK(back.s_I[i] == trk.s_I[i]);
        CHECK((back.truth->quats[i].coeffs() - trk.truth->quats[i].coeffs()).norm() < 1e-15);
    }
    CHECK(back.truth->omega_bi_mid == trk.truth->omega_bi_mid);

    const auto h = trk.truth_history();
    const auto hb = history_from_json(json::parse(history_to_json(h).dump()));
    for (std::size_t i = 0; i < h.size(); ++i) CHECK((hb[i].coeffs() - h[i].coeffs()).norm() < 1e-15);

    // Missing truth is allowed; malformed fields name themselves.
    json j = tracklet_to_json(trk);
    j.erase("truth");
    CHECK_FALSE(tracklet_from_json(j).truth.has_value());
    j["v_I"].erase(3);
    try {
        tracklet_from_json(j);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("v_I") != std::string::npos);
    }

    const auto csv = tracklet_csv(trk);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == long(trk.size()) + 1);
}

TEST_CASE("simulate configs") {
    SUBCASE("recipe defaults and overrides") {
        const auto c = simulate_config_from_json(base_config());
        CHECK(c.dataset.seed == 5);
        CHECK(c.dataset.t_start == sim::utc_seconds(2022, 1, 10));
        CHECK(c.dataset.dynamics == sim::Dynamics::FixedAxis);
        CHECK(c.object == "cube");
        json j = base_config();
        j["recipe"] = "dataset2";
        j["inertia"] = 3;
        j["samples"] = 120;
        const auto d = simulate_config_from_json(j);
        CHECK(d.dataset.dynamics == sim::Dynamics::TorqueFree);
        CHECK(d.dataset.inertia == 3);
        CHECK(d.dataset.samples == 120);
    }
    SUBCASE("expanded form round-trips to the same hash") {
        for (const char* recipe : {"dataset1", "dataset1a", "dataset2"}) {
            json j = base_config();
            j["recipe"] = recipe;
            const auto c = simulate_config_from_json(j);
            const auto again = simulate_config_from_json(simulate_config_to_json(c));
            CHECK(config_hash(again) == config_hash(c));
            CHECK(again.object == c.object);
            CHECK(again.dataset.orbit.epoch == c.dataset.orbit.epoch);
            CHECK(config_hash(c).size() == 16);
        }
    }
    SUBCASE("hash tracks content") {
        json j = base_config();
        const auto h0 = config_hash(simulate_config_from_json(j));
        j["seed"] = 6;
        CHECK(config_hash(simulate_config_from_json(j)) != h0);
        j = base_config();
        j["noise_sigma"] = 0.01;
        CHECK(config_hash(simulate_config_from_json(j)) != h0);
    }
    SUBCASE("errors") {
        json j = base_config();
        j["bogus"] = 1;
        try {
            simulate_config_from_json(j);
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()) == "unknown config key 'bogus'");
        }
        j = base_config();
        j["orbit"] = json{{"a_km", 7000}, {"tilt", 3}};
        CHECK_THROWS_AS(simulate_config_from_json(j), ConfigError);
        j = base_config();
        j.erase("end");
        CHECK_THROWS_AS(simulate_config_from_json(j), ConfigError);
        j = base_config();
        j["seed"] = "five";
        CHECK_THROWS_AS(simulate_config_from_json(j), ConfigError);
        j = base_config();
        j["recipe"] = "dataset9";
        CHECK_THROWS_AS(simulate_config_from_json(j), ConfigError);
    }
}

TEST_CASE("files") {
    const auto dir = std::filesystem::temp_directory_path() / "lcinv_io_test";
    std::filesystem::create_directories(dir);
    const auto path = (dir / "h.json").string();
    write_text_file(path, history_to_json(testutil::dataset1_fixture().front().truth_history()).dump());
    CHECK(history_from_json(read_json_file(path)).size() == testutil::dataset1_fixture().front().size());
    write_text_file(path, "{not json");
    CHECK_THROWS_AS(read_json_file(path), DataError);
    std::filesystem::remove_all(dir);
}
