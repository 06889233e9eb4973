#include "ehctrl/config_io.hpp"
#include "ehctrl/errors.hpp"
#include "ehctrl/simulator.hpp"
#include "ehctrl/telemetry_csv.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace ehctrl;
using nlohmann::json;

namespace {
std::filesystem::path repo_file(const std::string& rel) {
    return std::filesystem::path(EHCTRL_SOURCE_DIR) / rel;
}
}  // namespace

TEST_CASE("an empty document is the two-plant default") {
    const SimConfig c = parse_config(json::object());
    REQUIRE(c.nodes() == 2);
    CHECK(c.horizon == 10000);
    CHECK(c.seed == 1);
    CHECK(c.plants[0].model.a_open()(0, 0) == 1.1);
    CHECK(c.plants[1].model.a_closed()(0, 0) == 0.1);
    CHECK(c.channel.collision_prob == 0.25);
    CHECK(c.channel.fading_mean == 2.0);
    CHECK(c.energy[1].capacity == 20.0);
    CHECK(c.energy[1].initial_charge == 20.0);
    CHECK(c.energy[0].harvest.mean == 0.5);
    CHECK(c.scheduler.step == 1.0);
    CHECK(c.scheduler.nu_cap(0, 1) == 19.0);
    CHECK(c.scheduler.y_cap(1, 0) == 25.0);
    CHECK(std::abs(c.scheduler.required[0] - 0.3453) <= 5e-4);
    CHECK(std::abs(c.scheduler.required[1] - 0.2769) <= 5e-4);
    CHECK(c.sizing_issues().empty());
}

TEST_CASE("the shipped default config file matches the built-in default") {
    const SimConfig file = load_config(repo_file("configs/default.json"));
    CHECK(to_json(file) == to_json(SimConfig::reference_default()));
}

TEST_CASE("echoed configs parse back to the same config") {
    json doc = {{"horizon", 50},
                {"plants", json::array({{{"a_open", {{1.05, 0.1}, {0.0, 1.05}}}, {"a_closed", 0.1}, {"rho", 0.8},
                                         {"x0", {1.0, -1.0}}},
                                        {{"a_open", 1.2}, {"a_closed", 0.2}, {"rho", 0.9}}})},
                {"channel", {{"decoding", {{"curve", "logistic"}, {"a", 2.0}, {"b", 1.0}}}}},
                {"energy", {{"capacity", 30}, {"accounting", "per-transmission"},
                            {"nodes", json::array({json::object(), {{"harvest", {{"distribution", "uniform"}, {"mean", 0.7}}}}})}}},
                {"scheduler", {{"nu_cap", {{19, 10}, {10, 19}}}, {"y_cap", 40}, {"policy", "always-transmit"}}},
                {"availability", {{"mode", "piggyback"}, {"max_staleness", 5}}},
                {"telemetry", {{"window", {3, 9}}}}};
    const SimConfig c = parse_config(doc);
    CHECK(c.plants[0].model.dim() == 2);
    CHECK(c.plants[0].x0(1) == -1.0);
    CHECK(c.plants[0].model.a_closed()(1, 1) == 0.1);
    CHECK(c.energy[0].initial_charge == 30.0);
    CHECK(c.energy[1].harvest.distribution == HarvestConfig::Distribution::uniform);
    CHECK(c.energy[1].capacity == 30.0);
    CHECK(c.accounting == EnergyAccounting::per_transmission);
    CHECK(c.scheduler.nu_cap(0, 1) == 10.0);
    CHECK(c.policy == SchedulingPolicy::always_transmit);
    CHECK(c.availability.mode == AvailabilitySchedule::Mode::piggyback);
    CHECK(c.telemetry.window_end == 9);
    CHECK(to_json(parse_config(to_json(c))) == to_json(c));
}

TEST_CASE("bad configs are rejected") {
    CHECK_THROWS_AS(parse_config({{"horizn", 5}}), ConfigError);
    CHECK_THROWS_AS(parse_config({{"channel", {{"collision_prob", 2.0}}}}), ConfigError);
    CHECK_THROWS_AS(parse_config({{"energy", {{"harvest", {{"mean", 0.0}}}}}}), ConfigError);
    CHECK_THROWS_AS(parse_config({{"plants", json::array()}}), ConfigError);
    CHECK_THROWS_AS(parse_config({{"plants", json::array({{{"a_open", 1.1}}})}}), ConfigError);
    CHECK_THROWS_AS(parse_config({{"plants", json::array({{{"a_open", 1.1}, {"a_closed", 0.95}, {"rho", 0.8}}})}}),
                    InfeasibleRateError);
    CHECK_THROWS_AS(parse_config({{"scheduler", {{"required", {0.3}}}}}), ConfigError);
    CHECK_THROWS_AS(parse_config({{"scheduler", {{"policy", "greedy"}}}}), ConfigError);
    CHECK_THROWS_AS(parse_config({{"seed", "one"}}), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("config files may carry comments") {
    const auto path = std::filesystem::temp_directory_path() / "ehctrl_comment.json";
    {
        std::ofstream out(path);
        out << "// short run\n{ \"horizon\": 12, /* inline */ \"seed\": 9 }\n";
    }
    const SimConfig c = load_config(path);
    CHECK(c.horizon == 12);
    CHECK(c.seed == 9);
    std::filesystem::remove(path);
}

TEST_CASE("dotted paths set nested values") {
    json doc = json::object();
    set_config_value(doc, "energy.harvest.mean", 0.3);
    set_config_value(doc, "availability.max_staleness", 20.0);
    const SimConfig c = parse_config(doc);
    CHECK(c.energy[0].harvest.mean == 0.3);
    CHECK(c.energy[1].harvest.mean == 0.3);
    CHECK(c.availability.max_staleness == 20);
    CHECK_THROWS_AS(set_config_value(doc, "energy..mean", 1.0), ConfigError);
}

TEST_CASE("summary json carries the config echo") {
    SimConfig c = SimConfig::reference_default();
    c.horizon = 100;
    const Summary s = run(c);
    const json j = summary_json(c, s);
    CHECK(j.at("config") == to_json(c));
    CHECK(j.at("nodes").size() == 2);
    std::ostringstream os;
    write_summary_csv(os, s);
    CHECK(os.str().rfind("node,p_required,p_tx,p_rx,p_rx_empirical,ctrl_perf", 0) == 0);
}

TEST_CASE("number formatting round-trips") {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, 12345.678, -0.0, 2.5e17}) {
        CHECK(std::stod(format_number(v)) == v);
    }
    CHECK(format_number(20.0) == "20");
}
