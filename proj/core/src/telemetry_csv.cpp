#include "ehctrl/telemetry_csv.hpp"

#include "ehctrl/config_io.hpp"
#include "ehctrl/errors.hpp"

#include <array>
#include <charconv>

namespace ehctrl {

std::string format_number(double v) {
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + path.string());
    return out;
}

Eigen::Index max_dimension(const SimConfig& config) {
    Eigen::Index n = 1;
    for (const PlantSetup& p : config.plants) n = std::max(n, p.model.dim());
    return n;
}

void slots_header(std::ostream& out, Eigen::Index max_dim, std::size_t nodes) {
    out << "slot,node";
    for (Eigen::Index k = 1; k <= max_dim; ++k) out << ",x_" << k;
    out << ",V,z,tx,gamma,h,q,b,e,phi";
    for (std::size_t j = 1; j <= nodes; ++j) out << ",nu_" << j;
    out << ",beta\n";
}

void slot_rows(std::ostream& out, const SlotRecord& slot, Eigen::Index max_dim) {
    for (std::size_t i = 0; i < slot.nodes.size(); ++i) {
        const NodeSlotRecord& r = slot.nodes[i];
        out << slot.slot << ',' << i + 1;
        for (Eigen::Index k = 0; k < max_dim; ++k) {
            out << ',';
            if (k < r.x.size()) out << format_number(r.x(k));
        }
        out << ',' << format_number(r.lyapunov) << ',' << format_number(r.z) << ','
            << (r.transmitted ? 1 : 0) << ',' << (r.gamma ? 1 : 0) << ',' << format_number(r.h) << ','
            << format_number(r.q) << ',' << format_number(r.charge) << ',' << format_number(r.harvest)
            << ',' << format_number(r.phi);
        for (double nu : r.nu) out << ',' << format_number(nu);
        out << ',' << format_number(r.beta) << '\n';
    }
}

}  // namespace

CsvTelemetryWriter::CsvTelemetryWriter(const std::filesystem::path& dir, const SimConfig& config)
    : nodes_(config.nodes()),
      max_dim_(max_dimension(config)),
      window_(config.telemetry),
      averages_(config.nodes()) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
    slots_ = open_out(dir / "slots.csv");
    averages_out_ = open_out(dir / "averages.csv");
    window_out_ = open_out(dir / "schedule_window.csv");

    slots_header(slots_, max_dim_, nodes_);
    averages_out_ << "slot,node,ctrl_perf,p_tx,p_rx,p_rx_empirical,energy_balance,phi_mean";
    for (std::size_t j = 1; j <= nodes_; ++j) averages_out_ << ",nu_mean_" << j;
    averages_out_ << ",beta_mean\n";
    window_out_ << "slot,node,q,z,tx,collided,gamma\n";
}

void CsvTelemetryWriter::record(const SlotRecord& slot) {
    slot_rows(slots_, slot, max_dim_);

    averages_.add(slot);
    for (std::size_t i = 0; i < nodes_; ++i) {
        const auto m = averages_.means(i);
        averages_out_ << slot.slot << ',' << i + 1 << ',' << format_number(m.ctrl_perf) << ','
                      << format_number(m.p_tx) << ',' << format_number(m.p_rx) << ','
                      << format_number(m.p_rx_empirical) << ',' << format_number(m.energy_balance) << ','
                      << format_number(m.phi);
        for (double nu : m.nu) averages_out_ << ',' << format_number(nu);
        averages_out_ << ',' << format_number(m.beta) << '\n';
    }

    if (slot.slot >= window_.window_begin && slot.slot <= window_.window_end) {
        for (std::size_t i = 0; i < nodes_; ++i) {
            const NodeSlotRecord& r = slot.nodes[i];
            window_out_ << slot.slot << ',' << i + 1 << ',' << format_number(r.q) << ','
                        << format_number(r.z) << ',' << (r.transmitted ? 1 : 0) << ','
                        << (r.collided ? 1 : 0) << ',' << (r.gamma ? 1 : 0) << '\n';
        }
    }
}

void CsvTelemetryWriter::flush() {
    slots_.flush();
    averages_out_.flush();
    window_out_.flush();
}

void write_slots_csv(std::ostream& out, const SimConfig& config, const std::vector<SlotRecord>& records) {
    const Eigen::Index max_dim = max_dimension(config);
    slots_header(out, max_dim, config.nodes());
    for (const SlotRecord& r : records) slot_rows(out, r, max_dim);
}

void write_summary_csv(std::ostream& out, const Summary& summary) {
    const std::size_t m = summary.nodes.size();
    out << "node,p_required,p_tx,p_rx,p_rx_empirical,ctrl_perf,ctrl_bound,energy_balance,phi_mean,beta_mean";
    for (std::size_t j = 1; j <= m; ++j) out << ",nu_mean_" << j;
    for (std::size_t j = 1; j <= m; ++j) out << ",nu_max_" << j;
    out << ",final_charge,transmissions,collisions,cap_triggers,cap_resets,causality_violations,"
           "dual_cap_violations,mirror_violations,mirror_max_error\n";
    for (std::size_t i = 0; i < m; ++i) {
        const NodeSummary& n = summary.nodes[i];
        out << i + 1 << ',' << format_number(n.required) << ',' << format_number(n.p_tx) << ','
            << format_number(n.p_rx) << ',' << format_number(n.p_rx_empirical) << ','
            << format_number(n.ctrl_perf) << ',' << format_number(n.ctrl_bound) << ','
            << format_number(n.energy_balance) << ',' << format_number(n.phi_mean) << ','
            << format_number(n.beta_mean);
        for (double v : n.nu_mean) out << ',' << format_number(v);
        for (double v : n.nu_max) out << ',' << format_number(v);
        out << ',' << format_number(n.final_charge) << ',' << n.transmissions << ',' << n.collisions << ','
            << n.cap_triggers << ',' << n.cap_resets << ',' << n.causality_violations << ','
            << n.dual_cap_violations << ',' << n.mirror_violations << ',' << format_number(n.mirror_max_error)
            << '\n';
    }
}

nlohmann::json summary_json(const SimConfig& config, const Summary& summary) {
    nlohmann::json nodes = nlohmann::json::array();
    for (std::size_t i = 0; i < summary.nodes.size(); ++i) {
        const NodeSummary& n = summary.nodes[i];
        nodes.push_back({{"node", i + 1},
                         {"p_required", n.required},
                         {"p_tx", n.p_tx},
                         {"p_rx", n.p_rx},
                         {"p_rx_empirical", n.p_rx_empirical},
                         {"ctrl_perf", n.ctrl_perf},
                         {"ctrl_bound", n.ctrl_bound},
                         {"energy_balance", n.energy_balance},
                         {"phi_mean", n.phi_mean},
                         {"beta_mean", n.beta_mean},
                         {"nu_mean", n.nu_mean},
                         {"nu_max", n.nu_max},
                         {"final_charge", n.final_charge},
                         {"transmissions", n.transmissions},
                         {"collisions", n.collisions},
                         {"cap_triggers", n.cap_triggers},
                         {"cap_resets", n.cap_resets},
                         {"violations",
                          {{"causality", n.causality_violations},
                           {"dual_cap", n.dual_cap_violations},
                           {"mirror", n.mirror_violations}}},
                         {"mirror_max_error", n.mirror_max_error}});
    }
    return {{"slots", summary.slots}, {"seed", summary.seed}, {"nodes", nodes}, {"config", to_json(config)}};
}

void write_summary_files(const std::filesystem::path& dir, const SimConfig& config, const Summary& summary) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
    std::ofstream csv = open_out(dir / "summary.csv");
    write_summary_csv(csv, summary);
    std::ofstream js = open_out(dir / "summary.json");
    js << summary_json(config, summary).dump(2) << '\n';
}

}  // namespace ehctrl
