#include "canopy/errors.hpp"
#include "canopy/pipeline.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <string>
#include <vector>

namespace {

void print_error(const char* type, const std::string& message) {
    nlohmann::ordered_json err;
    err["error"] = {{"type", type}, {"message", message}};
    std::fprintf(stderr, "%s\n", err.dump().c_str());
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"canopy-plan: reforestation planning and carbon-offset forecasting"};
    app.require_subcommand(1);

    std::string config_path;
    std::string sector;
    std::string output_dir;
    int holdout = 0;
    int horizon = 0;
    int grid_steps = 0;
    int seasonal_period = 0;
    int plant_year = 0;
    bool merge_overlaps = false;

    const std::pair<std::string, std::string> descriptions[] = {
        {"ingest", "validate the emissions table and write canonical per-sector CSVs"},
        {"backtest", "fit each sector on its train split and score the holdout years"},
        {"forecast", "fit the configured sector and extrapolate the horizon"},
        {"detect-area", "convert detection label files into per-image and total area"},
        {"recommend", "retrieve species suited to the configured soil/humidity key"},
        {"plan", "size tree counts, labor, and growth timelines for the detected area"},
        {"offset", "project forecast emissions against planting sequestration"},
        {"report", "run every stage and write the combined summary"},
    };
    for (const auto& [name, description] : descriptions) {
        auto* sub = app.add_subcommand(name, description);
        sub->add_option("--config", config_path, "scenario configuration JSON")->required();
        sub->add_option("--sector", sector, "sector to forecast");
        sub->add_option("--holdout", holdout, "backtest holdout years");
        sub->add_option("--horizon", horizon, "forecast horizon years");
        sub->add_option("--grid-steps", grid_steps, "optimizer grid resolution per axis");
        sub->add_option("--seasonal-period", seasonal_period, "enable seasonal smoothing");
        sub->add_option("--plant-year", plant_year, "calendar year of planting");
        sub->add_option("--output-dir", output_dir, "artifact directory");
        sub->add_flag("--merge-overlaps", merge_overlaps,
                      "union overlapping boxes instead of summing them");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e); // --help
        }
        print_error("usage", e.what());
        return 2;
    }

    CLI::App* sub = app.get_subcommands().front();
    try {
        auto cfg = canopy::pipeline::ScenarioConfig::load(config_path);
        if (sub->count("--sector") > 0) cfg.sector = sector;
        if (sub->count("--holdout") > 0) {
            if (holdout < 1) throw canopy::ConfigError("config field 'holdout': must be >= 1");
            cfg.holdout = static_cast<std::size_t>(holdout);
        }
        if (sub->count("--horizon") > 0) {
            if (horizon < 1) throw canopy::ConfigError("config field 'horizon': must be >= 1");
            cfg.horizon = horizon;
        }
        if (sub->count("--grid-steps") > 0) {
            if (grid_steps < 2) {
                throw canopy::ConfigError("config field 'grid_steps': must be >= 2");
            }
            cfg.grid_steps = grid_steps;
        }
        if (sub->count("--seasonal-period") > 0) {
            if (seasonal_period < 2) {
                throw canopy::ConfigError("config field 'seasonal_period': must be >= 2");
            }
            cfg.seasonal_period = seasonal_period;
        }
        if (sub->count("--plant-year") > 0) cfg.plant_year = plant_year;
        if (sub->count("--output-dir") > 0) cfg.output_dir = output_dir;
        if (sub->count("--merge-overlaps") > 0) cfg.merge_overlaps = merge_overlaps;

        const auto artifacts = canopy::pipeline::run_stage(sub->get_name(), cfg);
        for (const auto& path : artifacts.written) {
            std::printf("wrote %s\n", path.string().c_str());
        }
        return 0;
    } catch (const canopy::ConfigError& e) {
        print_error("config", e.what());
        return 2;
    } catch (const std::exception& e) {
        print_error("module", e.what());
        return 1;
    }
}
