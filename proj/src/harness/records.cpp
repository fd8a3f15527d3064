#include "trafficrl/harness/records.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

#include "trafficrl/errors.hpp"

namespace trafficrl::harness {

std::string to_string(ControllerKind kind) { return kind == ControllerKind::Fixed ? "fixed" : "marl"; }

ControllerKind parse_controller(const std::string& name) {
    if (name == "fixed") return ControllerKind::Fixed;
    if (name == "marl") return ControllerKind::Marl;
    throw UsageError("unknown controller '" + name + "' (expected fixed or marl)");
}

RunRecord RunRecord::from_metrics(ControllerKind controller, std::uint64_t seed, const sim::RunMetrics& m,
                                  double wall_seconds) {
    return RunRecord{controller, seed, m.vehicles_passed, m.total_wait, m.mean_wait_per_vehicle, m.spawned,
                     wall_seconds};
}

nlohmann::ordered_json to_json(const RunRecord& r) {
    nlohmann::ordered_json j;
    j["controller"] = to_string(r.controller);
    j["seed"] = r.seed;
    j["vehicles_passed"] = r.vehicles_passed;
    j["total_wait"] = r.total_wait;
    j["mean_wait"] = r.mean_wait;
    j["spawned"] = r.spawned;
    return j;
}

std::string format_double(double value) {
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), res.ptr);
}

void write_runs_csv(std::ostream& out, const std::vector<RunRecord>& records) {
    out << kRunsCsvHeader << '\n';
    for (std::size_t i = 0; i < records.size(); ++i) {
        out << (i + 1) << ',' << records[i].vehicles_passed << ',' << format_double(records[i].total_wait) << '\n';
    }
}

void write_runs_csv(const std::filesystem::path& path, const std::vector<RunRecord>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    write_runs_csv(out, records);
    if (!out) throw IoError("write failed for " + path.string());
}

namespace {

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_cell(const std::string& raw, const std::string& column, const std::string& source, long line) {
    const std::string cell = trim(raw);
    double value = 0.0;
    const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (cell.empty() || res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
        throw FormatError(source + ":" + std::to_string(line) + ": cannot parse " + column + " value '" + cell + "'");
    }
    return value;
}

}  // namespace

RunsTable read_runs_csv(std::istream& in, const std::string& source) {
    RunsTable table;
    std::string line;
    long line_no = 0;
    int col_run = -1, col_vehicles = -1, col_wait = -1;
    std::size_t columns = 0;

    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto cells = split_row(line);
        if (columns == 0) {
            columns = cells.size();
            for (std::size_t i = 0; i < cells.size(); ++i) {
                const auto name = trim(cells[i]);
                if (name == "run") {
                    col_run = static_cast<int>(i);
                } else if (name == "vehicles_passed") {
                    col_vehicles = static_cast<int>(i);
                } else if (name == "wait_time_s") {
                    col_wait = static_cast<int>(i);
                } else {
                    table.warnings.push_back(source + ":" + std::to_string(line_no) + ": ignoring unknown column '" +
                                             name + "'");
                }
            }
            if (col_vehicles < 0 || col_wait < 0) {
                throw FormatError(source + ":" + std::to_string(line_no) +
                                  ": header must name vehicles_passed and wait_time_s (expected '" +
                                  kRunsCsvHeader + "')");
            }
            continue;
        }
        if (cells.size() != columns) {
            throw FormatError(source + ":" + std::to_string(line_no) + ": expected " + std::to_string(columns) +
                              " fields, found " + std::to_string(cells.size()));
        }
        table.run.push_back(col_run >= 0 ? parse_cell(cells[col_run], "run", source, line_no)
                                         : static_cast<double>(table.run.size() + 1));
        table.vehicles_passed.push_back(parse_cell(cells[col_vehicles], "vehicles_passed", source, line_no));
        table.wait_time.push_back(parse_cell(cells[col_wait], "wait_time_s", source, line_no));
    }
    if (columns == 0) throw FormatError(source + ": empty file, no header");
    return table;
}

RunsTable read_runs_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot read " + path.string());
    return read_runs_csv(in, path.string());
}

stats::RunColumns to_columns(const RunsTable& table) { return {table.vehicles_passed, table.wait_time}; }

stats::RunColumns to_columns(const std::vector<RunRecord>& records) {
    stats::RunColumns c;
    for (const auto& r : records) {
        c.vehicles_passed.push_back(static_cast<double>(r.vehicles_passed));
        c.wait_time.push_back(r.total_wait);
    }
    return c;
}

}  // namespace trafficrl::harness
