#pragma once

#include <filesystem>
#include <string_view>

#include <nlohmann/json.hpp>

#include "cavsol/cli/config.hpp"

namespace cavsol::cli {

// Each command writes its CSV series, summary.json and config.json into
// out (created if missing) and returns the summary document.

nlohmann::ordered_json cmd_dispersion(const ExperimentConfig& cfg, const std::filesystem::path& out);
nlohmann::ordered_json cmd_soliton(const ExperimentConfig& cfg, const std::filesystem::path& out);
nlohmann::ordered_json cmd_collide(const ExperimentConfig& cfg, const std::filesystem::path& out);
nlohmann::ordered_json cmd_transition(const ExperimentConfig& cfg, const std::filesystem::path& out);
nlohmann::ordered_json cmd_oracle_compare(const ExperimentConfig& cfg,
                                          const std::filesystem::path& out);

// Dispatches on "dispersion", "soliton", "collide", "transition",
// "oracle-compare"; throws ConfigError for anything else.
nlohmann::ordered_json run_command(std::string_view name, const ExperimentConfig& cfg,
                                   const std::filesystem::path& out);

}  // namespace cavsol::cli
