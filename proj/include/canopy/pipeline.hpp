#ifndef CANOPY_PIPELINE_HPP
#define CANOPY_PIPELINE_HPP

#include "canopy/scenario.hpp"

#include <filesystem>
#include <string_view>
#include <vector>

namespace canopy::pipeline {

struct StageArtifacts {
    std::vector<std::filesystem::path> written;
};

/// Stage runners. Each recomputes its inputs from the scenario fixtures, so
/// running stages individually composes to the same content as `report`.
/// On failure the stage's partially written artifacts are removed before the
/// error propagates.
StageArtifacts run_ingest(const ScenarioConfig& cfg);
StageArtifacts run_backtest(const ScenarioConfig& cfg);
StageArtifacts run_forecast(const ScenarioConfig& cfg);
StageArtifacts run_detect_area(const ScenarioConfig& cfg);
StageArtifacts run_recommend(const ScenarioConfig& cfg);
StageArtifacts run_plan(const ScenarioConfig& cfg);
StageArtifacts run_offset(const ScenarioConfig& cfg);
StageArtifacts run_report(const ScenarioConfig& cfg);

inline constexpr std::string_view kSubcommands[] = {
    "ingest", "backtest", "forecast", "detect-area",
    "recommend", "plan", "offset", "report"};

/// Dispatch by subcommand name; unknown names raise ArgumentError.
StageArtifacts run_stage(std::string_view name, const ScenarioConfig& cfg);

} // namespace canopy::pipeline

#endif
