#include "irrlab/harness/report.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace irrlab::harness {

namespace {

std::string format(const char* fmt, auto... args)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, fmt, args...);
    return buf;
}

void write_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    out.flush();
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
}

} // namespace

nlohmann::json to_json(const SummaryStats& s)
{
    return {{"mean_ms", s.mean_ms}, {"stddev_ms", s.stddev_ms}, {"variance", s.variance},
            {"min_ms", s.min_ms},   {"max_ms", s.max_ms},       {"n", s.n}};
}

SummaryStats stats_from_json(const nlohmann::json& j)
{
    SummaryStats s;
    s.mean_ms = j.at("mean_ms").get<double>();
    s.stddev_ms = j.at("stddev_ms").get<double>();
    s.variance = j.at("variance").get<double>();
    s.min_ms = j.at("min_ms").get<double>();
    s.max_ms = j.at("max_ms").get<double>();
    s.n = j.at("n").get<std::size_t>();
    return s;
}

nlohmann::json to_json(const RunResult& r)
{
    nlohmann::json j{
        {"experiment", r.config.name},
        {"injected_delay_ms", r.config.injected_delay_ms},
        {"interaction_rate_hz", r.config.interaction_rate_hz},
        {"interaction_count", r.measurements.size()},
        {"seed", r.config.seed},
        {"mode", std::string(sim::to_string(r.config.mode))},
        {"stats", to_json(r.stats)},
        {"protocol_errors", r.protocol_errors},
        {"server", {{"handled", r.server.handled}, {"errors", r.server.errors},
                    {"frame_bytes", r.server.frame_bytes}, {"mean_render_ms", r.server.mean_render_ms}}},
    };
    j["shift_ms"] = r.shift_ms ? nlohmann::json(*r.shift_ms) : nlohmann::json(nullptr);
    return j;
}

nlohmann::json to_json(const ComparisonReport& r)
{
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : r.rows) {
        rows.push_back({{"delay_ms", row.delay_ms},
                        {"integrated", to_json(row.integrated)},
                        {"lmt", lmt::to_json(row.lmt)},
                        {"delta_ms", row.delta_ms}});
    }
    return {{"rows", std::move(rows)}, {"max_capture_ms", r.max_capture_ms()}};
}

void write_measurement_log(std::ostream& out, const std::vector<testbed::Measurement>& ms)
{
    out << "index,guid,interaction,submit_us,complete_us,il_ms\n";
    for (const auto& m : ms) {
        out << m.index << ',' << m.id.to_string() << ',' << m.interaction << ',' << m.submit_us << ','
            << m.complete_us << ',' << format("%.3f", m.il_ms) << '\n';
    }
}

std::vector<testbed::Measurement> read_measurement_log(std::istream& in)
{
    std::vector<testbed::Measurement> out;
    std::string line;
    if (!std::getline(in, line) || line.rfind("index,", 0) != 0) {
        throw std::runtime_error("measurement log has no header");
    }
    std::size_t n = 1;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty()) {
            continue;
        }
        std::istringstream row(line);
        std::string index, guid, key, submit, complete, il;
        if (!std::getline(row, index, ',') || !std::getline(row, guid, ',') || !std::getline(row, key, ',') ||
            !std::getline(row, submit, ',') || !std::getline(row, complete, ',') || !std::getline(row, il) ||
            key.size() != 1) {
            throw std::runtime_error("malformed measurement log line " + std::to_string(n));
        }
        try {
            testbed::Measurement m;
            m.index = std::stoull(index);
            m.id = testbed::Guid::parse(guid);
            m.interaction = key[0];
            m.submit_us = std::stoll(submit);
            m.complete_us = std::stoll(complete);
            m.il_ms = std::stod(il);
            out.push_back(m);
        } catch (const std::exception& e) {
            throw std::runtime_error("malformed measurement log line " + std::to_string(n) + ": " + e.what());
        }
    }
    return out;
}

void write_plot_csv(std::ostream& out, const std::vector<testbed::Measurement>& ms)
{
    out << "index,il_ms\n";
    for (const auto& m : ms) {
        out << m.index << ',' << format("%.3f", m.il_ms) << '\n';
    }
}

TableRow table_row(const RunResult& r)
{
    return {r.config.name, r.config.injected_delay_ms, r.stats, r.shift_ms};
}

std::string render_table(const std::vector<TableRow>& rows)
{
    std::string out = format("%-20s %9s %6s %10s %10s %10s %10s %10s %10s\n", "experiment", "delay_ms", "n",
                             "mean_ms", "stddev_ms", "variance", "min_ms", "max_ms", "shift_ms");
    for (const auto& r : rows) {
        const std::string shift = r.shift_ms ? format("%10.2f", *r.shift_ms) : format("%10s", "-");
        out += format("%-20s %9.1f %6zu %10.2f %10.2f %10.2f %10.2f %10.2f ", r.experiment.c_str(), r.delay_ms,
                      r.stats.n, r.stats.mean_ms, r.stats.stddev_ms, r.stats.variance, r.stats.min_ms,
                      r.stats.max_ms) +
               shift + "\n";
    }
    return out;
}

std::string render_comparison(const ComparisonReport& r)
{
    std::string out = format("%9s %6s %16s %10s %10s %8s %8s\n", "delay_ms", "n", "integrated_mean", "lmt_mean",
                             "delta_ms", "misses", "spurious");
    for (const auto& row : r.rows) {
        out += format("%9.1f %6zu %16.2f %10.2f %10.2f %8zu %8zu\n", row.delay_ms, row.lmt.stats.n,
                      row.integrated.mean_ms, row.lmt.stats.mean_ms, row.delta_ms, row.lmt.misses,
                      row.lmt.false_positives);
    }
    out += format("capture period %.2f ms\n", r.max_capture_ms());
    return out;
}

std::filesystem::path experiment_dir(const std::filesystem::path& output_dir, const std::string& name)
{
    auto dir = output_dir / name;
    std::filesystem::create_directories(dir);
    return dir;
}

std::filesystem::path write_run_outputs(const RunResult& r)
{
    const auto dir = experiment_dir(r.config.output_dir, r.config.name);
    {
        std::ofstream log(dir / "log.csv", std::ios::binary | std::ios::trunc);
        write_measurement_log(log, r.measurements);
        if (!log) {
            throw std::runtime_error("cannot write " + (dir / "log.csv").string());
        }
    }
    write_file(dir / "stats.json", to_json(r).dump(2) + "\n");
    write_file(dir / "report.txt", render_table({table_row(r)}));
    return dir;
}

std::filesystem::path write_comparison_outputs(const std::filesystem::path& output_dir, const std::string& name,
                                               const ComparisonReport& r)
{
    const auto dir = experiment_dir(output_dir, name);
    std::string log = "delay_ms,event,event_us,detection_us,lmt_il_ms\n";
    for (const auto& row : r.rows) {
        for (std::size_t i = 0; i < row.lmt.rows.size(); ++i) {
            const auto& ev = row.lmt.rows[i];
            log += format("%.1f,%zu,%lld,", row.delay_ms, i, static_cast<long long>(ev.event.timestamp_us));
            if (ev.detection) {
                log += format("%lld,%.3f", static_cast<long long>(ev.detection->timestamp_us), *ev.il_ms);
            } else {
                log += ",";
            }
            log += "\n";
        }
    }
    write_file(dir / "log.csv", log);
    write_file(dir / "stats.json", to_json(r).dump(2) + "\n");
    write_file(dir / "report.txt", render_comparison(r));
    return dir;
}

TableRow load_table_row(const std::filesystem::path& stats_json)
{
    std::ifstream in(stats_json);
    if (!in) {
        throw std::runtime_error("cannot open " + stats_json.string());
    }
    const auto j = nlohmann::json::parse(in);
    TableRow row;
    row.experiment = j.at("experiment").get<std::string>();
    row.delay_ms = j.at("injected_delay_ms").get<double>();
    row.stats = stats_from_json(j.at("stats"));
    if (j.contains("shift_ms") && !j["shift_ms"].is_null()) {
        row.shift_ms = j["shift_ms"].get<double>();
    }
    return row;
}

} // namespace irrlab::harness
