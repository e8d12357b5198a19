#pragma once

// JSON scenarios and certificates, CSV traces.
//
// Signal grammar:
//   {"sum": [{"cos": {"amp": -2, "omega": 0.314, "phase": 0}}, {"ramp": 0.1},
//            {"const": 0}, {"poly": [c0, c1, c2]}]}
// A single term may also stand on its own, e.g. {"ramp": 0.3}.

#include <filesystem>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "mastrack/bounds.hpp"
#include "mastrack/scenario.hpp"
#include "mastrack/simulation.hpp"

namespace mastrack {

/// Parse or schema failure; the message starts with the JSON path.
class ScenarioError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

SignalSpec signal_from_json(const nlohmann::json& j, const std::string& path = "signal");
nlohmann::ordered_json signal_to_json(const SignalSpec& s);

Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::ordered_json scenario_to_json(const Scenario& s);

Scenario load_scenario(const std::filesystem::path& path);
void save_scenario(const Scenario& s, const std::filesystem::path& path);

/// 16 hex digits of FNV-1a over the canonical JSON text.
std::string scenario_digest(const Scenario& s);

nlohmann::ordered_json certificate_to_json(const BoundCertificate& c);
nlohmann::ordered_json report_to_json(const VerificationReport& r);

/// Header row, then one line per recorded time; "%.17g" numbers.
std::string format_table_csv(const Table& table);
void export_table(const Table& table, const std::filesystem::path& path);
void export_trace(const SimTrace& trace, const std::filesystem::path& path);
Table read_table_csv(const std::filesystem::path& path);

/// $MAS_TRACK_FIXTURES if set, otherwise the bundled fixtures directory.
std::filesystem::path fixture_dir();
Scenario load_fixture(const std::string& file_name);

}  // namespace mastrack
