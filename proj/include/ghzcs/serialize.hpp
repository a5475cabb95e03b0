#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "ghzcs/circuit.hpp"
#include "ghzcs/coverage.hpp"
#include "ghzcs/fidelity.hpp"
#include "ghzcs/mitigate.hpp"
#include "ghzcs/recover.hpp"
#include "ghzcs/simulate.hpp"

namespace ghzcs {

// ordered_json keeps the documented field order; doubles round-trip exactly.
using json = nlohmann::ordered_json;

json circuit_to_json(const Circuit& circuit);
Circuit circuit_from_json(const json& j);

json flag_plan_to_json(const FlagPlan& plan);
FlagPlan flag_plan_from_json(const json& j);

json counts_to_json(const CountsTable& counts);
CountsTable counts_from_json(const json& j);

json recovery_result_to_json(const RecoveryResult& result);
RecoveryResult recovery_result_from_json(const json& j);

json fidelity_report_to_json(const FidelityReport& report);

ConfusionModel confusion_from_json(const json& j);

// CSV with a schema comment line, then the header `phi,parity,shots`.
std::string parity_samples_to_csv(const std::vector<ParitySample>& samples);
std::vector<ParitySample> parity_samples_from_csv(const std::string& text);

// Shortest representation that parses back to the identical double.
std::string format_double(double value);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

} // namespace ghzcs
