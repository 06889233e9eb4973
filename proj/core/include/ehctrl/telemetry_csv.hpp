#pragma once

#include "ehctrl/sim_config.hpp"
#include "ehctrl/telemetry.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>

namespace ehctrl {

/// Shortest decimal text that parses back to exactly `v`.
std::string format_number(double v);

/// Streams a run into an output directory:
///
///   slots.csv            slot,node,x_1..x_n,V,z,tx,gamma,h,q,b,e,phi,nu_1..nu_M,beta
///   averages.csv         slot,node,ctrl_perf,p_tx,p_rx,p_rx_empirical,energy_balance,
///                        phi_mean,nu_mean_1..nu_mean_M,beta_mean   (running means up to the slot)
///   schedule_window.csv  slot,node,q,z,tx,collided,gamma           (slots inside the window)
///
/// Nodes are numbered from 1, slots from 0. x columns run to the largest
/// plant dimension and are left empty past a plant's own dimension.
/// Everything written is flushed when the writer is destroyed, including
/// after a run aborts.
class CsvTelemetryWriter final : public TelemetrySink {
public:
    CsvTelemetryWriter(const std::filesystem::path& dir, const SimConfig& config);
    void record(const SlotRecord& slot) override;
    void flush();

private:
    std::size_t nodes_;
    Eigen::Index max_dim_;
    TelemetryOptions window_;
    RunningAverages averages_;
    std::ofstream slots_;
    std::ofstream averages_out_;
    std::ofstream window_out_;
};

/// Writes the header and one row per record to `out` (slots.csv layout).
void write_slots_csv(std::ostream& out, const SimConfig& config, const std::vector<SlotRecord>& records);

/// summary.csv: one row per node.
void write_summary_csv(std::ostream& out, const Summary& summary);

/// Machine-readable summary, with the config echo under "config".
nlohmann::json summary_json(const SimConfig& config, const Summary& summary);

/// summary.csv + summary.json into `dir`.
void write_summary_files(const std::filesystem::path& dir, const SimConfig& config, const Summary& summary);

}  // namespace ehctrl
