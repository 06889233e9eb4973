#include "cli.hpp"
#include "ehctrl/control_model.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
};

Result cli(std::vector<std::string> args) {
    args.insert(args.begin(), "ehctrl");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    std::ostringstream out, err;
    const int code = ehctrl::cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("ehctrl_cli_" + name);
    fs::remove_all(p);
    return p;
}

fs::path write_json(const std::string& name, const std::string& text) {
    const fs::path p = fs::temp_directory_path() / ("ehctrl_cli_" + name + ".json");
    std::ofstream(p) << text;
    return p;
}

const std::string kDefault = std::string(EHCTRL_SOURCE_DIR) + "/configs/default.json";

}  // namespace

TEST_CASE("required-prob for scalar plants") {
    auto r = cli({"required-prob", "--a-open", "1.05", "--a-closed", "0.1", "--rho", "0.8"});
    CHECK(r.code == 0);
    CHECK(r.out == "0.2769\n");
    r = cli({"required-prob", "--a-open", "1.1", "--a-closed", "0.15", "--rho", "0.8"});
    CHECK(r.out == "0.3453\n");
    r = cli({"required-prob", "--a-open", "0.5", "--a-closed", "0.1", "--rho", "0.8"});
    CHECK(std::stod(r.out) == 0.0);
    CHECK(cli({"required-prob", "--a-open", "1.1", "--a-closed", "0.95"}).code == 2);
    CHECK(cli({"required-prob"}).code == 2);
    r = cli({"required-prob", "--config", kDefault});
    CHECK(r.out == "plant 1: 0.3453\nplant 2: 0.2769\n");
}

TEST_CASE("required-prob for matrix plant files matches the theta grid") {
    std::mt19937_64 rng(31);
    for (int k = 0; k < 5; ++k) {
        const ehctrl::PlantModel m = ehctrl::testing::random_matrix_plant(rng);
        std::ostringstream js;
        js.precision(17);
        auto mat = [&](const ehctrl::Matrix& a) {
            js << "[[" << a(0, 0) << "," << a(0, 1) << "],[" << a(1, 0) << "," << a(1, 1) << "]]";
        };
        js << "{\"a_open\":";
        mat(m.a_open());
        js << ",\"a_closed\":";
        mat(m.a_closed());
        js << ",\"lyapunov\":";
        mat(m.lyapunov());
        js << ",\"rho\":" << m.rho() << "}";
        const auto path = write_json("plant" + std::to_string(k), js.str());
        const auto r = cli({"required-prob", "--plant", path.string(), "--precision", "8"});
        REQUIRE(r.code == 0);
        CHECK(std::abs(std::stod(r.out) - ehctrl::testing::theta_grid_oracle(m)) <= 1e-3);
        fs::remove(path);
    }
}

TEST_CASE("run writes telemetry and is reproducible") {
    const auto a = scratch("run_a"), b = scratch("run_b");
    CHECK(cli({"run", "--config", kDefault, "--horizon", "300", "--seed", "1", "--out", a.string()}).code == 0);
    CHECK(cli({"run", "--config", kDefault, "--horizon", "300", "--seed", "1", "--out", b.string(), "--threads", "2"})
              .code == 0);
    for (const char* f : {"slots.csv", "averages.csv", "schedule_window.csv", "summary.csv", "summary.json"}) {
        CHECK(fs::exists(a / f));
    }
    CHECK(slurp(a / "slots.csv") == slurp(b / "slots.csv"));
    CHECK(slurp(a / "summary.csv") == slurp(b / "summary.csv"));
    CHECK(slurp(a / "slots.csv").rfind("slot,node,x_1,V,z,tx,gamma,h,q,b,e,phi,nu_1,nu_2,beta\n", 0) == 0);
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("run reports the required probability") {
    const auto d = scratch("run_p");
    const auto r = cli({"run", "--horizon", "50", "--out", d.string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("node 1: p_required 0.3453") != std::string::npos);
    fs::remove_all(d);
}

TEST_CASE("zero horizon gives empty outputs") {
    const auto d = scratch("run_zero");
    CHECK(cli({"run", "--horizon", "0", "--out", d.string()}).code == 0);
    CHECK(slurp(d / "slots.csv") == "slot,node,x_1,V,z,tx,gamma,h,q,b,e,phi,nu_1,nu_2,beta\n");
    fs::remove_all(d);
}

TEST_CASE("config errors exit with 2") {
    const auto bad = write_json("bad", "{\"horizon\": -3, \"colour\": 1}");
    CHECK(cli({"run", "--config", bad.string(), "--out", scratch("bad").string()}).code == 2);
    CHECK(cli({"run", "--config", "/nonexistent.json"}).code == 2);
    CHECK(cli({"bogus"}).code == 2);
    fs::remove(bad);
}

TEST_CASE("strict mode refuses an undersized config") {
    const auto cfg = write_json("undersized", "{\"horizon\": 20, \"scheduler\": {\"y_cap\": 20}}");
    const auto d = scratch("strict");
    CHECK(cli({"run", "--config", cfg.string(), "--out", d.string(), "--strict"}).code == 2);
    CHECK_FALSE(fs::exists(d / "slots.csv"));
    CHECK(cli({"run", "--config", cfg.string(), "--out", d.string()}).code == 0);
    fs::remove_all(d);
    fs::remove(cfg);
}

TEST_CASE("invariant breaches exit with 3 and keep partial telemetry") {
    const auto cfg = write_json("breach", R"({
        "horizon": 500,
        "plants": [{"a_open": 1.1, "a_closed": 0.15, "rho": 0.8}],
        "channel": {"decoding": {"curve": "ideal"}},
        "energy": {"harvest": {"distribution": "none", "mean": 0}, "capacity": 30, "initial_charge": 1},
        "scheduler": {"step_size": 2.0, "required": [0.9], "policy": "always-transmit"}
    })");
    const auto d = scratch("breach");
    CHECK(cli({"run", "--config", cfg.string(), "--out", d.string()}).code == 3);
    const std::string slots = slurp(d / "slots.csv");
    CHECK(std::count(slots.begin(), slots.end(), '\n') > 1);
    fs::remove_all(d);
    fs::remove(cfg);
}

TEST_CASE("check-config") {
    auto r = cli({"check-config", "--config", kDefault});
    CHECK(r.code == 0);
    CHECK(r.out.find("pass") != std::string::npos);

    const auto tight = write_json("tight", "{\"scheduler\": {\"y_cap\": 20}}");
    r = cli({"check-config", "--config", tight.string(), "--strict"});
    CHECK(r.code == 2);
    CHECK(r.out.find("FAIL y_cap(1,1) = 20 >= (nu_cap + 2 step) / step = 21") != std::string::npos);
    CHECK(cli({"check-config", "--config", tight.string()}).code == 0);

    const auto half = write_json("half", "{\"scheduler\": {\"step_size\": 0.5, \"y_cap\": 50}}");
    r = cli({"check-config", "--config", half.string(), "--strict"});
    CHECK(r.code == 2);
    CHECK(r.out.find("nu_cap / step + 1 = 39") != std::string::npos);
    fs::remove(tight);
    fs::remove(half);
}

TEST_CASE("sweep writes one row per point and node") {
    const auto d = scratch("sweep");
    auto r = cli({"sweep", "--param", "energy.harvest.mean", "--values", "0.4,0.5,0.6", "--horizon", "200",
                  "--out", d.string(), "--threads", "2"});
    CHECK(r.code == 0);
    const std::string a = slurp(d / "sweep.csv");
    CHECK(std::count(a.begin(), a.end(), '\n') == 1 + 3 * 2);
    r = cli({"sweep", "--param", "energy.harvest.mean", "--values", "0.4,0.5,0.6", "--horizon", "200",
             "--out", d.string()});
    CHECK(slurp(d / "sweep.csv") == a);

    r = cli({"sweep", "--param", "channel.collision_prob", "--from", "0.1", "--to", "0.3", "--steps", "3",
             "--horizon", "100", "--out", d.string()});
    CHECK(r.code == 0);
    const std::string b = slurp(d / "sweep.csv");
    CHECK(b.find("channel.collision_prob,0.3,") != std::string::npos);
    CHECK(cli({"sweep", "--param", "nope.key", "--values", "1", "--out", d.string()}).code == 2);
    fs::remove_all(d);
    CHECK(ehctrl::cli::derive_seed(1, 0) != ehctrl::cli::derive_seed(1, 1));
}
