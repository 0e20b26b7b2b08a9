#pragma once

#include <string>

#include "json.hpp"

#include "aquasem/experiment.hpp"
#include "aquasem/pipeline.hpp"

namespace aquasem {

// JSON views used by the CLI and the Python bindings. Non-finite metric
// values are encoded as the strings "inf"/"nan" to stay valid JSON.
nlohmann::json metric_report_to_json(const MetricReport& report);
nlohmann::json trial_to_json(const TrialRecord& record);

// SweepConfig <-> JSON with the config field names verbatim. "backends" is
// either the string "mock" or an endpoint object; relative paths are
// resolved against base_dir when it is non-empty.
SweepConfig sweep_config_from_json(const nlohmann::json& j, const std::string& base_dir = "");
nlohmann::json sweep_config_to_json(const SweepConfig& cfg);

// The resolved configuration, toolkit version and provider identities,
// written next to the CSV outputs of a sweep.
nlohmann::json sweep_manifest(const SweepConfig& cfg, const ProviderSet& providers);

}  // namespace aquasem
