#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "trafficrl/sim/types.hpp"
#include "trafficrl/stats/comparison.hpp"

namespace trafficrl::harness {

enum class ControllerKind { Fixed, Marl };

std::string to_string(ControllerKind kind);
// "fixed" or "marl"; anything else is a UsageError.
ControllerKind parse_controller(const std::string& name);

struct RunRecord {
    ControllerKind controller = ControllerKind::Fixed;
    std::uint64_t seed = 0;
    std::int64_t vehicles_passed = 0;
    double total_wait = 0.0;
    double mean_wait = 0.0;
    std::int64_t spawned = 0;
    double wall_seconds = 0.0;  // kept out of every data file

    static RunRecord from_metrics(ControllerKind controller, std::uint64_t seed, const sim::RunMetrics& m,
                                  double wall_seconds);
};

// Data fields only; wall-clock time is deliberately absent so output is reproducible.
nlohmann::ordered_json to_json(const RunRecord& record);

// Shortest decimal text that reads back to the same double; never locale dependent.
std::string format_double(double value);

inline constexpr const char* kRunsCsvHeader = "run,vehicles_passed,wait_time_s";

// One row per record, numbered from 1 in the given order.
void write_runs_csv(std::ostream& out, const std::vector<RunRecord>& records);
void write_runs_csv(const std::filesystem::path& path, const std::vector<RunRecord>& records);

struct RunsTable {
    std::vector<double> run;
    std::vector<double> vehicles_passed;
    std::vector<double> wait_time;
    std::vector<std::string> warnings;  // e.g. ignored extra columns
};

/// Reads a runs CSV. Columns are found by header name, so extra columns are
/// skipped (with a warning); missing columns or unparsable cells raise
/// FormatError citing the line number.
RunsTable read_runs_csv(std::istream& in, const std::string& source = "<stream>");
RunsTable read_runs_csv(const std::filesystem::path& path);

stats::RunColumns to_columns(const RunsTable& table);
stats::RunColumns to_columns(const std::vector<RunRecord>& records);

}  // namespace trafficrl::harness
