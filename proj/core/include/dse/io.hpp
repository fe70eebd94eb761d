#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dse/budget.hpp"
#include "dse/explorer.hpp"
#include "dse/hardware.hpp"
#include "dse/ip_database.hpp"
#include "dse/simulator.hpp"
#include "dse/workload.hpp"

namespace dse {

using json = nlohmann::json;

/// Stamped into every artifact so a result can be traced to its inputs.
struct RunInfo {
  std::string spec_hash;
  std::uint64_t seed = 0;
  std::string version;
};

std::string tool_version();
/// 64-bit FNV-1a, lower-case hex.
std::string fnv1a_hex(const std::string& bytes);

/// Throws SchemaError when the file is missing or not valid JSON.
json read_json(const std::filesystem::path& path);
std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const json& j);

// All parsers reject unknown fields and wrong types with SchemaError.

TaskGraph workload_from_json(const json& j);
json workload_to_json(const TaskGraph& g);
TaskGraph load_workload(const std::filesystem::path& path);

IpDatabase database_from_json(const json& j);
json database_to_json(const IpDatabase& db);
IpDatabase load_database(const std::filesystem::path& path);

/// File units are ms and mW; in memory everything is SI.
Budget budget_from_json(const json& j);
json budget_to_json(const Budget& b);
Budget load_budget(const std::filesystem::path& path);

DesignPoint design_from_json(const json& j);
json design_to_json(const DesignPoint& d);
DesignPoint load_design(const std::filesystem::path& path);

ExplorerConfig config_from_json(const json& j);
json config_to_json(const ExplorerConfig& c);

json result_to_json(const SimResult& r);

json move_to_json(const Move& m);
Move move_from_json(const json& j);

json trace_to_json(const ExplorationTrace& t);
ExplorationTrace trace_from_json(const json& j);

json checkpoint_to_json(const AnnealState& s);
AnnealState checkpoint_from_json(const json& j);

/// Trace CSV: one provenance comment line, a fixed header, one row per iteration.
extern const char* const kTraceCsvHeader;
void write_trace_csv(std::ostream& os, const ExplorationTrace& trace, const RunInfo& info);
/// Reads back the rows of a trace CSV as string fields (header excluded).
std::vector<std::vector<std::string>> read_csv_rows(std::istream& is, std::string* header = nullptr,
                                                    std::string* provenance = nullptr);

/// Quotes a field when it contains a comma, quote or newline.
std::string csv_field(const std::string& s);
std::string provenance_line(const RunInfo& info);

}  // namespace dse
