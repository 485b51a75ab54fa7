#ifndef CANOPY_SCENARIO_HPP
#define CANOPY_SCENARIO_HPP

#include "canopy/detection.hpp"
#include "canopy/emissions.hpp"
#include "canopy/planting.hpp"
#include "canopy/species.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace canopy::pipeline {

/// Declarative description of one end-to-end run. Loaded from a JSON file;
/// relative paths resolve against the file's directory. Gateway credentials
/// are deliberately not part of the file (GATEWAY_URL / GATEWAY_KEY env).
struct ScenarioConfig {
    std::filesystem::path base_dir;
    std::filesystem::path output_dir = "out";

    // emissions + forecasting
    std::optional<std::filesystem::path> emissions_path;
    emissions::ColumnMap column_map;
    std::string sector = "cement";
    std::size_t holdout = 6;
    int horizon = 10;
    int grid_steps = 21;
    std::optional<int> seasonal_period;
    std::string source_note;

    // detection
    std::optional<std::filesystem::path> labels_dir;
    std::optional<std::filesystem::path> manifest_path;
    detection::ClassMap class_map = detection::default_class_map();
    bool merge_overlaps = false;

    // species
    std::optional<std::filesystem::path> kb_dir;
    std::optional<std::filesystem::path> species_csv;
    std::optional<species::SoilClimateKey> key;

    // planting + offset
    int plant_year = 2025;
    planting::Allocation::Mode allocation_mode = planting::Allocation::Mode::whole_area;
    std::map<std::string, double> allocation_fractions; // species name -> share
    std::vector<std::string> offset_species; // empty = first recommended
    int timeline_years = 10;

    static ScenarioConfig load(const std::filesystem::path& config_path);
};

} // namespace canopy::pipeline

#endif
