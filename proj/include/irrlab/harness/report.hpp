#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "irrlab/harness/experiment.hpp"

namespace irrlab::harness {

nlohmann::json to_json(const SummaryStats& s);
SummaryStats stats_from_json(const nlohmann::json& j);

nlohmann::json to_json(const RunResult& r);
nlohmann::json to_json(const ComparisonReport& r);

/// `index,guid,interaction,submit_us,complete_us,il_ms`, one row per
/// measurement.
void write_measurement_log(std::ostream& out, const std::vector<testbed::Measurement>& ms);

/// Parses a log written by write_measurement_log. Throws std::runtime_error
/// on malformed rows.
std::vector<testbed::Measurement> read_measurement_log(std::istream& in);

/// Plot series `index,il_ms`.
void write_plot_csv(std::ostream& out, const std::vector<testbed::Measurement>& ms);

struct TableRow {
    std::string experiment;
    double delay_ms = 0.0;
    SummaryStats stats;
    std::optional<double> shift_ms;
};

TableRow table_row(const RunResult& r);

/// Fixed-width text table, one line per row after the header.
std::string render_table(const std::vector<TableRow>& rows);
std::string render_comparison(const ComparisonReport& r);

/// `<output_dir>/<name>/`, created if needed.
std::filesystem::path experiment_dir(const std::filesystem::path& output_dir, const std::string& name);

/// Writes log.csv, stats.json and report.txt; returns the directory.
std::filesystem::path write_run_outputs(const RunResult& r);

/// Writes log.csv (per-event rows), stats.json and report.txt.
std::filesystem::path write_comparison_outputs(const std::filesystem::path& output_dir, const std::string& name,
                                               const ComparisonReport& r);

/// Rebuilds a table row from a stats.json written by write_run_outputs.
TableRow load_table_row(const std::filesystem::path& stats_json);

} // namespace irrlab::harness
