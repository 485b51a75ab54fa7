#include "canopy/scenario.hpp"

#include "canopy/errors.hpp"

#include <json.hpp>

#include <fmt/format.h>

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace canopy::pipeline {

namespace {

using nlohmann::json;

[[noreturn]] void fail(std::string_view field, std::string_view what) {
    throw ConfigError(fmt::format("config field '{}': {}", field, what));
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
}

std::string require_string(const json& j, const char* field) {
    if (!j.is_string()) fail(field, "expected a string");
    return j.get<std::string>();
}

int require_int(const json& j, const char* field) {
    if (!j.is_number_integer()) fail(field, "expected an integer");
    return j.get<int>();
}

} // namespace

ScenarioConfig ScenarioConfig::load(const std::filesystem::path& config_path) {
    std::ifstream in(config_path);
    if (!in) {
        throw ConfigError(fmt::format("config field 'config': cannot open '{}'",
                                      config_path.string()));
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    const json doc = json::parse(buf.str(), nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        throw ConfigError(fmt::format("config field 'config': '{}' is not a JSON object",
                                      config_path.string()));
    }

    static const std::set<std::string> known{
        "emissions_path", "column_map",  "sector",        "holdout",
        "horizon",        "grid_steps",  "seasonal_period", "source_note",
        "labels_dir",     "manifest_path", "class_map",   "merge_overlaps",
        "kb_dir",         "species_csv", "key",           "plant_year",
        "allocation",     "offset_species", "timeline_years", "output_dir"};
    for (const auto& [field, value] : doc.items()) {
        (void)value;
        if (!known.contains(field)) fail(field, "unknown field");
    }

    ScenarioConfig cfg;
    cfg.base_dir = config_path.has_parent_path() ? config_path.parent_path()
                                                 : std::filesystem::path(".");

    if (doc.contains("emissions_path")) {
        cfg.emissions_path = resolve(cfg.base_dir,
                                     require_string(doc["emissions_path"], "emissions_path"));
    }
    if (doc.contains("column_map")) {
        if (!doc["column_map"].is_object()) fail("column_map", "expected an object");
        for (const auto& [header, sector] : doc["column_map"].items()) {
            cfg.column_map.emplace(header, emissions::Sector::from_label(
                                               require_string(sector, "column_map")));
        }
    }
    if (doc.contains("sector")) cfg.sector = require_string(doc["sector"], "sector");
    if (doc.contains("holdout")) {
        const int v = require_int(doc["holdout"], "holdout");
        if (v < 1) fail("holdout", "must be at least 1");
        cfg.holdout = static_cast<std::size_t>(v);
    }
    if (doc.contains("horizon")) {
        cfg.horizon = require_int(doc["horizon"], "horizon");
        if (cfg.horizon < 1) fail("horizon", "must be at least 1");
    }
    if (doc.contains("grid_steps")) {
        cfg.grid_steps = require_int(doc["grid_steps"], "grid_steps");
        if (cfg.grid_steps < 2) fail("grid_steps", "must be at least 2");
    }
    if (doc.contains("seasonal_period")) {
        cfg.seasonal_period = require_int(doc["seasonal_period"], "seasonal_period");
        if (*cfg.seasonal_period < 2) fail("seasonal_period", "must be at least 2");
    }
    if (doc.contains("source_note")) {
        cfg.source_note = require_string(doc["source_note"], "source_note");
    }

    if (doc.contains("labels_dir")) {
        cfg.labels_dir = resolve(cfg.base_dir, require_string(doc["labels_dir"], "labels_dir"));
    }
    if (doc.contains("manifest_path")) {
        cfg.manifest_path = resolve(cfg.base_dir,
                                    require_string(doc["manifest_path"], "manifest_path"));
    }
    if (doc.contains("class_map")) {
        if (!doc["class_map"].is_object()) fail("class_map", "expected an object");
        cfg.class_map.clear();
        for (const auto& [index, label] : doc["class_map"].items()) {
            int idx = 0;
            auto [ptr, ec] = std::from_chars(index.data(), index.data() + index.size(), idx);
            if (ec != std::errc{} || ptr != index.data() + index.size()) {
                fail("class_map", fmt::format("key '{}' is not an integer", index));
            }
            cfg.class_map.emplace(idx, require_string(label, "class_map"));
        }
    }
    if (doc.contains("merge_overlaps")) {
        if (!doc["merge_overlaps"].is_boolean()) fail("merge_overlaps", "expected a boolean");
        cfg.merge_overlaps = doc["merge_overlaps"].get<bool>();
    }

    if (doc.contains("kb_dir")) {
        cfg.kb_dir = resolve(cfg.base_dir, require_string(doc["kb_dir"], "kb_dir"));
    }
    if (doc.contains("species_csv")) {
        cfg.species_csv = resolve(cfg.base_dir,
                                  require_string(doc["species_csv"], "species_csv"));
    }
    if (doc.contains("key")) {
        const auto& key = doc["key"];
        if (!key.is_object() || !key.contains("humidity_mm") || !key.contains("soil_type")) {
            fail("key", "expected {humidity_mm, soil_type}");
        }
        if (!key["humidity_mm"].is_number()) fail("key.humidity_mm", "expected a number");
        cfg.key = species::SoilClimateKey{key["humidity_mm"].get<double>(),
                                          require_string(key["soil_type"], "key.soil_type")};
        cfg.key->validate();
    }

    if (doc.contains("plant_year")) {
        cfg.plant_year = require_int(doc["plant_year"], "plant_year");
    }
    if (doc.contains("allocation")) {
        const auto& alloc = doc["allocation"];
        if (alloc.is_string() && alloc.get<std::string>() == "whole_area") {
            cfg.allocation_mode = planting::Allocation::Mode::whole_area;
        } else if (alloc.is_object() && alloc.value("mode", "") == "fractional") {
            cfg.allocation_mode = planting::Allocation::Mode::fractional;
            if (!alloc.contains("fractions") || !alloc["fractions"].is_object()) {
                fail("allocation.fractions", "expected an object of species shares");
            }
            for (const auto& [name, share] : alloc["fractions"].items()) {
                if (!share.is_number()) fail("allocation.fractions", "shares must be numbers");
                cfg.allocation_fractions.emplace(name, share.get<double>());
            }
        } else {
            fail("allocation", "expected \"whole_area\" or {mode: \"fractional\", fractions}");
        }
    }
    if (doc.contains("offset_species")) {
        if (!doc["offset_species"].is_array()) fail("offset_species", "expected an array");
        for (const auto& name : doc["offset_species"]) {
            cfg.offset_species.push_back(require_string(name, "offset_species"));
        }
    }
    if (doc.contains("timeline_years")) {
        cfg.timeline_years = require_int(doc["timeline_years"], "timeline_years");
        if (cfg.timeline_years < 1) fail("timeline_years", "must be at least 1");
    }
    if (doc.contains("output_dir")) {
        cfg.output_dir = std::filesystem::path(require_string(doc["output_dir"], "output_dir"));
    }
    return cfg;
}

} // namespace canopy::pipeline
