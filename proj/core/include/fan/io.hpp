#pragma once

// Versioned JSON artifacts: datasets with split bookkeeping, models (layer
// shapes + row-major weights), constraint specs, solver output, decisions,
// and evaluation reports. Key order is deterministic, so identical inputs
// produce byte-identical files.

#include <string>

#include "json.hpp"

#include "fan/constraints.hpp"
#include "fan/dataset.hpp"
#include "fan/metrics.hpp"
#include "fan/solver.hpp"
#include "fan/surrogate.hpp"

namespace fan {

using Json = nlohmann::json;

Json read_json_file(const std::string& path);
void write_json_file(const Json& j, const std::string& path);

// Rat <-> {"num": ..., "den": ...}; plain JSON numbers are also accepted on
// input (converted via exact decimal recovery).
Json rat_to_json(const Rat& r);
Rat rat_from_json(const Json& j);

Json dataset_to_json(const Dataset& d, const SplitIndices* splits = nullptr);
Dataset dataset_from_json(const Json& j, SplitIndices* splits = nullptr);

Json mlp_config_to_json(const MlpConfig& c);
MlpConfig mlp_config_from_json(const Json& j);

Json mlp_to_json(const Mlp& m);
Mlp mlp_from_json(const Json& j);

Json baseline_to_json(const BaselineModel& m, const GroupErrorRates& errors);
void baseline_from_json(const Json& j, BaselineModel& m, GroupErrorRates& errors);

Json spec_to_json(const ConstraintSpec& s);
ConstraintSpec spec_from_json(const Json& j);

Json solution_to_json(const IpSolution& s, const CellTable& table);
IpSolution solution_from_json(const Json& j);

Json decisions_to_json(const DecisionVector& d);
DecisionVector decisions_from_json(const Json& j);

Json eval_report_to_json(const EvalReport& r);

// FanModel bundle: a directory holding baseline.json, ab.json, fb.json and a
// manifest with t0 and config hashes.
void save_fan_model(const FanModel& m, const GroupErrorRates& baseline_errors, const std::string& dir);
FanModel load_fan_model(const std::string& dir, GroupErrorRates* baseline_errors = nullptr);

uint64_t fnv1a_hash(const std::string& s);

}  // namespace fan
