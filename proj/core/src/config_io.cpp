#include "ehctrl/config_io.hpp"

#include "ehctrl/errors.hpp"

#include <fstream>
#include <initializer_list>
#include <set>

namespace ehctrl {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const char* where, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw ConfigError(std::string(where) + " must be an object");
    const std::set<std::string> keys(allowed.begin(), allowed.end());
    for (const auto& [key, _] : obj.items()) {
        if (!keys.contains(key)) throw ConfigError(std::string(where) + ": unknown key '" + key + "'");
    }
}

double number(const json& v, const std::string& what) {
    if (!v.is_number()) throw ConfigError(what + " must be a number");
    return v.get<double>();
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback, const std::string& where) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(where + "." + key + " has the wrong type");
    }
}

/// `dim` < 0 means "infer from the value".
Matrix matrix(const json& v, Eigen::Index dim, const std::string& what) {
    if (v.is_number()) {
        const double s = v.get<double>();
        if (dim <= 1) return Matrix::Constant(1, 1, s);
        return s * Matrix::Identity(dim, dim);
    }
    if (!v.is_array() || v.empty()) throw ConfigError(what + " must be a number or a non-empty array of rows");
    const auto rows = static_cast<Eigen::Index>(v.size());
    const json& first = v.front();
    if (!first.is_array()) throw ConfigError(what + " rows must be arrays");
    const auto cols = static_cast<Eigen::Index>(first.size());
    Matrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const json& row = v[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
            throw ConfigError(what + " is ragged");
        }
        for (Eigen::Index c = 0; c < cols; ++c) {
            m(r, c) = number(row[static_cast<std::size_t>(c)], what);
        }
    }
    return m;
}

Vector vector(const json& v, Eigen::Index dim, const std::string& what) {
    if (v.is_number()) return Vector::Constant(dim, v.get<double>());
    if (!v.is_array() || static_cast<Eigen::Index>(v.size()) != dim) {
        throw ConfigError(what + " must be a number or an array of length " + std::to_string(dim));
    }
    Vector out(dim);
    for (Eigen::Index i = 0; i < dim; ++i) out(i) = number(v[static_cast<std::size_t>(i)], what);
    return out;
}

json matrix_json(const Matrix& m) {
    if (m.rows() == 1 && m.cols() == 1) return m(0, 0);
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(row);
    }
    return rows;
}

NodeEnergy parse_energy(const json& obj, const NodeEnergy& fallback, const std::string& where) {
    reject_unknown(obj, where.c_str(), {"harvest", "capacity", "initial_charge"});
    NodeEnergy e = fallback;
    if (obj.contains("harvest")) {
        const json& h = obj.at("harvest");
        reject_unknown(h, (where + ".harvest").c_str(), {"distribution", "mean"});
        e.harvest.distribution = HarvestConfig::parse(
            get_or<std::string>(h, "distribution", HarvestConfig::name(e.harvest.distribution), where));
        e.harvest.mean = get_or<double>(h, "mean", e.harvest.mean, where + ".harvest");
    }
    e.capacity = get_or<double>(obj, "capacity", e.capacity, where);
    // a full battery unless stated otherwise
    e.initial_charge = get_or<double>(obj, "initial_charge", obj.contains("capacity") ? e.capacity : e.initial_charge, where);
    return e;
}

}  // namespace

PlantSetup parse_plant(const json& node) {
    reject_unknown(node, "plant", {"a_open", "a_closed", "rho", "lyapunov", "noise_cov", "x0"});
    if (!node.contains("a_open") || !node.contains("a_closed") || !node.contains("rho")) {
        throw ConfigError("plant needs a_open, a_closed and rho");
    }
    Matrix a_open = matrix(node.at("a_open"), -1, "a_open");
    const Eigen::Index n = a_open.rows();
    Matrix a_closed = matrix(node.at("a_closed"), n, "a_closed");
    Matrix lyap = node.contains("lyapunov") ? matrix(node.at("lyapunov"), n, "lyapunov")
                                            : Matrix::Identity(n, n);
    Matrix cov = node.contains("noise_cov") ? matrix(node.at("noise_cov"), n, "noise_cov")
                                            : Matrix::Identity(n, n);
    const double rho = number(node.at("rho"), "rho");
    PlantSetup setup{PlantModel(std::move(a_closed), std::move(a_open), std::move(cov), std::move(lyap), rho),
                     Vector::Zero(n)};
    if (node.contains("x0")) setup.x0 = vector(node.at("x0"), n, "x0");
    return setup;
}

SimConfig parse_config(const json& doc) {
    reject_unknown(doc, "config",
                   {"horizon", "seed", "threads", "strict", "plants", "channel", "energy", "scheduler",
                    "availability", "telemetry"});
    SimConfig cfg = SimConfig::reference_default();
    try {
        cfg.horizon = get_or<std::uint64_t>(doc, "horizon", cfg.horizon, "config");
        cfg.seed = get_or<std::uint64_t>(doc, "seed", cfg.seed, "config");
        cfg.threads = get_or<std::size_t>(doc, "threads", cfg.threads, "config");
        cfg.strict = get_or<bool>(doc, "strict", cfg.strict, "config");

        if (doc.contains("plants")) {
            const json& plants = doc.at("plants");
            if (!plants.is_array() || plants.empty()) throw ConfigError("plants must be a non-empty array");
            cfg.plants.clear();
            for (const json& p : plants) cfg.plants.push_back(parse_plant(p));
        }
        const std::size_t m = cfg.plants.size();

        if (doc.contains("channel")) {
            const json& ch = doc.at("channel");
            reject_unknown(ch, "channel", {"fading_mean", "collision_prob", "decoding"});
            cfg.channel.fading_mean = get_or<double>(ch, "fading_mean", cfg.channel.fading_mean, "channel");
            cfg.channel.collision_prob = get_or<double>(ch, "collision_prob", cfg.channel.collision_prob, "channel");
            if (ch.contains("decoding")) {
                const json& d = ch.at("decoding");
                reject_unknown(d, "channel.decoding", {"curve", "a", "b"});
                const auto kind = DecodingCurve::parse_kind(get_or<std::string>(d, "curve", "exponential", "channel.decoding"));
                const double a = get_or<double>(d, "a", 1.0, "channel.decoding");
                const double b = get_or<double>(d, "b", 0.0, "channel.decoding");
                switch (kind) {
                    case DecodingCurve::Kind::exponential: cfg.channel.decode = DecodingCurve::exponential(a); break;
                    case DecodingCurve::Kind::logistic: cfg.channel.decode = DecodingCurve::logistic(a, b); break;
                    case DecodingCurve::Kind::ideal: cfg.channel.decode = DecodingCurve::ideal(); break;
                }
            }
        }

        NodeEnergy base = cfg.energy.front();
        cfg.energy.assign(m, base);
        if (doc.contains("energy")) {
            const json& en = doc.at("energy");
            reject_unknown(en, "energy", {"harvest", "capacity", "initial_charge", "accounting", "nodes"});
            json shared = en;
            shared.erase("accounting");
            shared.erase("nodes");
            base = parse_energy(shared, base, "energy");
            cfg.energy.assign(m, base);
            cfg.accounting = parse_accounting(get_or<std::string>(en, "accounting", "fluid", "energy"));
            if (en.contains("nodes")) {
                const json& nodes = en.at("nodes");
                if (!nodes.is_array() || nodes.size() != m) {
                    throw ConfigError("energy.nodes needs one entry per plant");
                }
                for (std::size_t i = 0; i < m; ++i) {
                    cfg.energy[i] = parse_energy(nodes[i], base, "energy.nodes[" + std::to_string(i) + "]");
                }
            }
        }

        SchedulerParams& sp = cfg.scheduler;
        json sched = doc.contains("scheduler") ? doc.at("scheduler") : json::object();
        reject_unknown(sched, "scheduler",
                       {"step_size", "nu_cap", "y_cap", "s_floor", "required", "policy", "tolerance"});
        sp.step = get_or<double>(sched, "step_size", 1.0, "scheduler");
        sp.s_floor = get_or<double>(sched, "s_floor", 1e-6, "scheduler");
        sp.collision_prob = cfg.channel.collision_prob;
        const auto dim = static_cast<Eigen::Index>(m);
        auto cap = [&](const char* key, double fallback) {
            if (!sched.contains(key)) return Matrix(Matrix::Constant(dim, dim, fallback));
            const json& v = sched.at(key);
            if (v.is_number()) return Matrix(Matrix::Constant(dim, dim, v.get<double>()));
            Matrix c = matrix(v, dim, std::string("scheduler.") + key);
            if (c.rows() != dim || c.cols() != dim) throw ConfigError(std::string("scheduler.") + key + " must be M x M");
            return c;
        };
        sp.nu_cap = cap("nu_cap", 19.0);
        sp.y_cap = cap("y_cap", 25.0);
        const double tol = get_or<double>(sched, "tolerance", 1e-6, "scheduler");
        if (sched.contains("required") && !sched.at("required").is_string()) {
            const json& r = sched.at("required");
            if (!r.is_array() || r.size() != m) throw ConfigError("scheduler.required must list one probability per plant");
            sp.required.clear();
            for (const json& v : r) sp.required.push_back(number(v, "scheduler.required"));
        } else {
            if (sched.contains("required") && sched.at("required").get<std::string>() != "auto") {
                throw ConfigError("scheduler.required must be \"auto\" or an array");
            }
            sp.required = required_probabilities(cfg.plants, tol);
        }
        const std::string policy = get_or<std::string>(sched, "policy", "adaptive", "scheduler");
        if (policy == "adaptive") {
            cfg.policy = SchedulingPolicy::adaptive;
        } else if (policy == "always-transmit") {
            cfg.policy = SchedulingPolicy::always_transmit;
        } else {
            throw ConfigError("unknown scheduling policy '" + policy + "'");
        }

        if (doc.contains("availability")) {
            const json& av = doc.at("availability");
            reject_unknown(av, "availability", {"mode", "prob", "max_staleness"});
            cfg.availability.mode = AvailabilitySchedule::parse(get_or<std::string>(av, "mode", "always-on", "availability"));
            cfg.availability.prob = get_or<double>(av, "prob", cfg.availability.prob, "availability");
            cfg.availability.max_staleness = get_or<std::uint32_t>(av, "max_staleness", cfg.availability.max_staleness, "availability");
        }

        if (doc.contains("telemetry")) {
            const json& te = doc.at("telemetry");
            reject_unknown(te, "telemetry", {"window"});
            if (te.contains("window")) {
                const json& w = te.at("window");
                if (!w.is_array() || w.size() != 2) throw ConfigError("telemetry.window must be [begin, end]");
                cfg.telemetry.window_begin = w[0].get<std::uint64_t>();
                cfg.telemetry.window_end = w[1].get<std::uint64_t>();
            }
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

json read_config_document(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    try {
        return json::parse(in, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw ConfigError("config " + path.string() + ": " + e.what());
    }
}

SimConfig load_config(const std::filesystem::path& path) { return parse_config(read_config_document(path)); }

json to_json(const SimConfig& cfg) {
    json plants = json::array();
    for (const PlantSetup& p : cfg.plants) {
        json x0 = json::array();
        for (Eigen::Index i = 0; i < p.x0.size(); ++i) x0.push_back(p.x0(i));
        plants.push_back({{"a_open", matrix_json(p.model.a_open())},
                          {"a_closed", matrix_json(p.model.a_closed())},
                          {"rho", p.model.rho()},
                          {"lyapunov", matrix_json(p.model.lyapunov())},
                          {"noise_cov", matrix_json(p.model.noise_cov())},
                          {"x0", p.x0.size() == 1 ? json(p.x0(0)) : x0}});
    }
    json nodes = json::array();
    for (const NodeEnergy& e : cfg.energy) {
        nodes.push_back({{"harvest", {{"distribution", HarvestConfig::name(e.harvest.distribution)},
                                      {"mean", e.harvest.mean}}},
                         {"capacity", e.capacity},
                         {"initial_charge", e.initial_charge}});
    }
    const json energy = {{"accounting", accounting_name(cfg.accounting)}, {"nodes", nodes}};
    return {
        {"horizon", cfg.horizon},
        {"seed", cfg.seed},
        {"threads", cfg.threads},
        {"strict", cfg.strict},
        {"plants", plants},
        {"channel",
         {{"fading_mean", cfg.channel.fading_mean},
          {"collision_prob", cfg.channel.collision_prob},
          {"decoding",
           {{"curve", DecodingCurve::kind_name(cfg.channel.decode.kind())},
            {"a", cfg.channel.decode.slope()},
            {"b", cfg.channel.decode.offset()}}}}},
        {"energy", energy},
        {"scheduler",
         {{"step_size", cfg.scheduler.step},
          {"nu_cap", matrix_json(cfg.scheduler.nu_cap)},
          {"y_cap", matrix_json(cfg.scheduler.y_cap)},
          {"s_floor", cfg.scheduler.s_floor},
          {"required", cfg.scheduler.required},
          {"policy", cfg.policy == SchedulingPolicy::adaptive ? "adaptive" : "always-transmit"}}},
        {"availability",
         {{"mode", AvailabilitySchedule::name(cfg.availability.mode)},
          {"prob", cfg.availability.prob},
          {"max_staleness", cfg.availability.max_staleness}}},
        {"telemetry", {{"window", {cfg.telemetry.window_begin, cfg.telemetry.window_end}}}},
    };
}

void set_config_value(json& doc, const std::string& dotted, const json& value) {
    if (dotted.empty()) throw ConfigError("empty parameter path");
    std::string pointer;
    std::size_t start = 0;
    while (start <= dotted.size()) {
        const std::size_t dot = dotted.find('.', start);
        const std::string part = dotted.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (part.empty()) throw ConfigError("malformed parameter path '" + dotted + "'");
        pointer += "/" + part;
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    try {
        doc[json::json_pointer(pointer)] = value;
    } catch (const json::exception& e) {
        throw ConfigError("cannot set '" + dotted + "': " + e.what());
    }
}

}  // namespace ehctrl
