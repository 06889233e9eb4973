#include "cli.hpp"

#include "ehctrl/config_io.hpp"
#include "ehctrl/errors.hpp"
#include "ehctrl/simulator.hpp"
#include "ehctrl/telemetry_csv.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>
#include <tbb/parallel_for.h>
#include <tbb/info.h>
#include <tbb/task_arena.h>

#include <cstdlib>
#include <fstream>
#include <iomanip>

namespace ehctrl::cli {

namespace {

std::shared_ptr<spdlog::logger> logger() {
    static std::shared_ptr<spdlog::logger> log = [] {
        auto l = spdlog::stderr_color_mt("ehctrl");
        l->set_pattern("[%l] %v");
        const char* level = std::getenv("EHCTRL_LOG");
        l->set_level(level ? spdlog::level::from_str(level) : spdlog::level::info);
        return l;
    }();
    return log;
}

nlohmann::json config_document(const std::optional<std::filesystem::path>& path) {
    return path ? read_config_document(*path) : nlohmann::json::object();
}

SimConfig resolve(const nlohmann::json& doc, const RunOptions& opts) {
    SimConfig cfg = parse_config(doc);
    if (opts.seed) cfg.seed = *opts.seed;
    if (opts.horizon) cfg.horizon = *opts.horizon;
    if (opts.threads) cfg.threads = *opts.threads;
    cfg.strict = cfg.strict || opts.strict;
    cfg.validate();
    return cfg;
}

void report_sizing(const SimConfig& cfg) {
    for (const SizingIssue& s : cfg.sizing_issues()) {
        logger()->warn("sizing rule {} ({},{}): {}", s.rule, s.i + 1, s.j + 1, s.message);
    }
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    // splitmix64 finaliser over (seed, index)
    std::uint64_t x = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

int cmd_run(const RunOptions& opts, std::ostream& out) {
    SimConfig cfg;
    try {
        cfg = resolve(config_document(opts.config), opts);
        report_sizing(cfg);
        if (cfg.strict && !cfg.sizing_issues().empty()) {
            logger()->error("strict mode: sizing rules violated, not running");
            return kExitConfig;
        }
    } catch (const ConfigError& e) {
        logger()->error("config error: {}", e.what());
        return kExitConfig;
    }

    Summary summary;
    try {
        CsvTelemetryWriter writer(opts.out_dir, cfg);
        summary = run(cfg, &writer);
    } catch (const InvariantViolation& e) {
        logger()->error("invariant violated: {}", e.what());
        return kExitInvariant;
    } catch (const ConfigError& e) {
        logger()->error("config error: {}", e.what());
        return kExitConfig;
    }
    write_summary_files(opts.out_dir, cfg, summary);

    out << "slots " << summary.slots << ", seed " << summary.seed << ", output " << opts.out_dir.string() << '\n';
    out << std::fixed << std::setprecision(4);
    for (std::size_t i = 0; i < summary.nodes.size(); ++i) {
        const NodeSummary& n = summary.nodes[i];
        out << "node " << i + 1 << ": p_required " << n.required << "  p_tx " << n.p_tx << "  p_rx "
            << n.p_rx << "  p_rx_empirical " << n.p_rx_empirical << "  ctrl_perf " << n.ctrl_perf
            << " (bound " << n.ctrl_bound << ")  energy_balance " << n.energy_balance << '\n';
    }
    return kExitOk;
}

int cmd_required_prob(const RequiredProbOptions& opts, std::ostream& out) {
    try {
        std::vector<PlantSetup> plants;
        if (opts.config) {
            plants = load_config(*opts.config).plants;
        } else if (opts.plant) {
            plants.push_back(parse_plant(read_config_document(*opts.plant)));
        } else if (opts.a_open && opts.a_closed) {
            plants.push_back({PlantModel::scalar(*opts.a_open, *opts.a_closed, opts.rho, opts.lyapunov), Vector::Zero(1)});
        } else {
            throw ConfigError("give --a-open and --a-closed, --plant FILE, or --config FILE");
        }
        out << std::fixed << std::setprecision(opts.precision);
        for (std::size_t i = 0; i < plants.size(); ++i) {
            const double p = required_reception_probability(plants[i].model, opts.tol);
            if (plants.size() > 1) out << "plant " << i + 1 << ": ";
            out << p << '\n';
        }
    } catch (const InfeasibleRateError& e) {
        logger()->error("{}", e.what());
        return kExitConfig;
    } catch (const ConfigError& e) {
        logger()->error("config error: {}", e.what());
        return kExitConfig;
    }
    return kExitOk;
}

int cmd_check_config(const CheckOptions& opts, std::ostream& out) {
    SimConfig cfg;
    try {
        cfg = parse_config(config_document(opts.config));
    } catch (const ConfigError& e) {
        out << "FAIL config: " << e.what() << '\n';
        return kExitConfig;
    }
    const auto& sp = cfg.scheduler;
    const double eps = sp.step;
    const auto m = static_cast<Eigen::Index>(cfg.nodes());
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) {
            const double need = (sp.nu_cap(i, j) + 2.0 * eps) / eps;
            out << (sp.y_cap(i, j) >= need - 1e-9 * std::max(1.0, need) ? "ok   " : "FAIL ") << "y_cap(" << i + 1
                << ',' << j + 1 << ") = " << sp.y_cap(i, j) << " >= (nu_cap + 2 step) / step = " << need << '\n';
        }
        const double need = sp.nu_cap(i, i) / eps + 1.0;
        const double have = cfg.energy[static_cast<std::size_t>(i)].capacity;
        out << (have >= need - 1e-9 * std::max(1.0, need) ? "ok   " : "FAIL ") << "capacity(" << i + 1 << ") = " << have
            << " >= nu_cap / step + 1 = " << need << '\n';
    }
    out << (eps <= 2.0 ? "ok   " : "FAIL ") << "step = " << eps << " <= 2\n";

    const auto issues = cfg.sizing_issues();
    const bool strict = opts.strict || cfg.strict;
    out << (issues.empty() ? "pass" : (strict ? "fail" : "warn")) << '\n';
    return issues.empty() || !strict ? kExitOk : kExitConfig;
}

int cmd_sweep(const SweepOptions& opts, std::ostream& out) {
    if (opts.param.empty() || opts.values.empty()) {
        logger()->error("sweep needs --param and at least one value");
        return kExitConfig;
    }
    const nlohmann::json base = [&] {
        try {
            return config_document(opts.base.config);
        } catch (const ConfigError& e) {
            logger()->error("config error: {}", e.what());
            return nlohmann::json();
        }
    }();
    if (base.is_null()) return kExitConfig;

    std::vector<SimConfig> configs;
    try {
        for (std::size_t k = 0; k < opts.values.size(); ++k) {
            nlohmann::json doc = base;
            set_config_value(doc, opts.param, opts.values[k]);
            SimConfig cfg = resolve(doc, opts.base);
            cfg.seed = derive_seed(cfg.seed, k);
            cfg.threads = 1;
            configs.push_back(std::move(cfg));
        }
    } catch (const ConfigError& e) {
        logger()->error("config error: {}", e.what());
        return kExitConfig;
    }

    struct Point {
        Summary summary;
        std::string status = "ok";
        int code = kExitOk;
    };
    std::vector<Point> points(configs.size());
    const int width = std::min(static_cast<int>(opts.base.threads.value_or(1)), tbb::info::default_concurrency());
    tbb::task_arena arena(std::max(width, 1));
    arena.execute([&] {
        tbb::parallel_for(std::size_t{0}, configs.size(), [&](std::size_t k) {
            try {
                points[k].summary = run(configs[k]);
            } catch (const InvariantViolation& e) {
                points[k] = {{}, std::string("invariant: ") + e.what(), kExitInvariant};
            } catch (const ConfigError& e) {
                points[k] = {{}, std::string("config: ") + e.what(), kExitConfig};
            }
        });
    });

    std::filesystem::create_directories(opts.base.out_dir);
    std::ofstream csv(opts.base.out_dir / "sweep.csv", std::ios::binary | std::ios::trunc);
    csv << "param,value,seed,node,p_required,p_tx,p_rx,p_rx_empirical,ctrl_perf,energy_balance,status\n";
    int code = kExitOk;
    for (std::size_t k = 0; k < points.size(); ++k) {
        const Point& pt = points[k];
        code = std::max(code, pt.code);
        std::string status = pt.status;
        for (char& c : status) {
            if (c == ',' || c == '\n') c = ';';
        }
        if (pt.summary.nodes.empty()) {
            csv << opts.param << ',' << format_number(opts.values[k]) << ',' << configs[k].seed << ",,,,,,,,"
                << status << '\n';
            continue;
        }
        for (std::size_t i = 0; i < pt.summary.nodes.size(); ++i) {
            const NodeSummary& n = pt.summary.nodes[i];
            csv << opts.param << ',' << format_number(opts.values[k]) << ',' << configs[k].seed << ',' << i + 1
                << ',' << format_number(n.required) << ',' << format_number(n.p_tx) << ','
                << format_number(n.p_rx) << ',' << format_number(n.p_rx_empirical) << ','
                << format_number(n.ctrl_perf) << ',' << format_number(n.energy_balance) << ',' << status << '\n';
        }
    }
    out << "sweep of " << opts.param << " over " << points.size() << " points written to "
        << (opts.base.out_dir / "sweep.csv").string() << '\n';
    return code;
}

int main(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Random-access scheduling simulator for energy-harvesting wireless control loops"};
    app.require_subcommand(1);

    RunOptions run_opts;
    std::string config_path;
    std::uint64_t seed = 0;
    std::uint64_t horizon = 0;
    std::size_t threads = 1;
    auto add_run_flags = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "Config file (JSON)");
        sub->add_option("--seed", seed, "Root seed override");
        sub->add_option("--horizon", horizon, "Number of slots override");
        sub->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--out", run_opts.out_dir, "Output directory");
        sub->add_flag("--strict", run_opts.strict, "Fail on sizing-rule violations");
    };

    CLI::App* run_cmd = app.add_subcommand("run", "Simulate and write telemetry CSVs");
    add_run_flags(run_cmd);

    CLI::App* sweep_cmd = app.add_subcommand("sweep", "Vary one config value over a grid");
    add_run_flags(sweep_cmd);
    SweepOptions sweep_opts;
    std::vector<double> values;
    double from = 0.0, to = 0.0;
    std::size_t steps = 0;
    sweep_cmd->add_option("--param", sweep_opts.param, "Dotted config key, e.g. energy.harvest.mean")->required();
    sweep_cmd->add_option("--values", values, "Comma-separated values")->delimiter(',');
    sweep_cmd->add_option("--from", from, "Grid start");
    sweep_cmd->add_option("--to", to, "Grid end");
    sweep_cmd->add_option("--steps", steps, "Number of grid points");

    CLI::App* req_cmd = app.add_subcommand("required-prob", "Minimal reception probability for a plant");
    RequiredProbOptions req_opts;
    std::string req_config, req_plant;
    double a_open = 0.0, a_closed = 0.0;
    auto* ao = req_cmd->add_option("--a-open", a_open, "Scalar open-loop gain");
    auto* ac = req_cmd->add_option("--a-closed", a_closed, "Scalar closed-loop gain");
    req_cmd->add_option("--rho", req_opts.rho, "Lyapunov decrease rate");
    req_cmd->add_option("--lyapunov", req_opts.lyapunov, "Scalar Lyapunov weight P");
    req_cmd->add_option("--plant", req_plant, "Plant description file (JSON, matrices allowed)");
    req_cmd->add_option("--config", req_config, "Config file: report every plant");
    req_cmd->add_option("--tol", req_opts.tol, "Bisection tolerance");
    req_cmd->add_option("--precision", req_opts.precision, "Printed decimals");

    CLI::App* check_cmd = app.add_subcommand("check-config", "Validate a config and its sizing rules");
    CheckOptions check_opts;
    std::string check_config;
    check_cmd->add_option("--config", check_config, "Config file (JSON)");
    check_cmd->add_flag("--strict", check_opts.strict, "Exit non-zero on a sizing-rule violation");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kExitOk : kExitConfig;
    }

    auto fill_run = [&](CLI::App* sub) {
        if (!config_path.empty()) run_opts.config = config_path;
        if (sub->count("--seed")) run_opts.seed = seed;
        if (sub->count("--horizon")) run_opts.horizon = horizon;
        if (sub->count("--threads")) run_opts.threads = threads;
    };

    if (run_cmd->parsed()) {
        fill_run(run_cmd);
        return cmd_run(run_opts, out);
    }
    if (sweep_cmd->parsed()) {
        fill_run(sweep_cmd);
        sweep_opts.base = run_opts;
        sweep_opts.values = values;
        if (sweep_cmd->count("--steps")) {
            if (steps == 1) {
                sweep_opts.values.push_back(from);
            } else {
                for (std::size_t k = 0; k < steps; ++k) {
                    sweep_opts.values.push_back(from + (to - from) * static_cast<double>(k) / static_cast<double>(steps - 1));
                }
            }
        }
        return cmd_sweep(sweep_opts, out);
    }
    if (req_cmd->parsed()) {
        if (ao->count()) req_opts.a_open = a_open;
        if (ac->count()) req_opts.a_closed = a_closed;
        if (!req_plant.empty()) req_opts.plant = req_plant;
        if (!req_config.empty()) req_opts.config = req_config;
        return cmd_required_prob(req_opts, out);
    }
    if (!check_config.empty()) check_opts.config = check_config;
    return cmd_check_config(check_opts, out);
}

}  // namespace ehctrl::cli
