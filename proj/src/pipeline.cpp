#include "canopy/pipeline.hpp"

#include "canopy/csv.hpp"
#include "canopy/errors.hpp"
#include "canopy/forecast.hpp"
#include "canopy/offset.hpp"
#include "canopy/text.hpp"

#include <json.hpp>

#include <fmt/format.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <future>
#include <sstream>

namespace canopy::pipeline {

namespace {

using ordered_json = nlohmann::ordered_json;

// Floats in JSON artifacts are fixed at 6 significant digits so that report
// outputs are byte-stable golden-test material.
double sig6(double v) {
    if (!std::isfinite(v) || v == 0.0) return v;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return std::strtod(buf, nullptr);
}

ordered_json json_optional(const std::optional<double>& v) {
    if (!v) return nullptr;
    return sig6(*v);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ArgumentError(fmt::format("cannot open '{}'", path.string()));
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

[[noreturn]] void missing(std::string_view field) {
    throw ConfigError(fmt::format("config field '{}': required by this subcommand", field));
}

std::filesystem::path require_file(const std::optional<std::filesystem::path>& path,
                                   std::string_view field) {
    if (!path) missing(field);
    if (!std::filesystem::exists(*path)) {
        throw ConfigError(fmt::format("config field '{}': path '{}' does not exist", field,
                                      path->string()));
    }
    return *path;
}

/// Collects files written by one stage so a failing stage leaves nothing
/// half-finished behind.
class ArtifactSink {
public:
    explicit ArtifactSink(const std::filesystem::path& dir) : dir_(dir) {
        std::error_code ec;
        std::filesystem::create_directories(dir_, ec);
        if (ec) {
            throw ConfigError(fmt::format("config field 'output_dir': cannot create '{}': {}",
                                          dir_.string(), ec.message()));
        }
    }

    void write(std::string_view filename, std::string_view content) {
        const auto path = dir_ / filename;
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out || !(out << content)) {
            throw Error(fmt::format("cannot write artifact '{}'", path.string()));
        }
        written_.push_back(path);
    }

    void discard() {
        for (const auto& path : written_) {
            std::error_code ec;
            std::filesystem::remove(path, ec);
        }
        written_.clear();
    }

    std::vector<std::filesystem::path> take() { return std::move(written_); }

private:
    std::filesystem::path dir_;
    std::vector<std::filesystem::path> written_;
};

template <typename Fn>
StageArtifacts with_sink(const ScenarioConfig& cfg, Fn&& fn) {
    ArtifactSink sink(cfg.output_dir);
    try {
        fn(sink);
    } catch (...) {
        sink.discard();
        throw;
    }
    return {sink.take()};
}

// ---- shared stage computations -----------------------------------------

emissions::EmissionsDataset load_dataset(const ScenarioConfig& cfg) {
    const auto path = require_file(cfg.emissions_path, "emissions_path");
    if (cfg.column_map.empty()) missing("column_map");
    auto dataset = emissions::parse_emissions_table(read_file(path), cfg.column_map);
    dataset.source_note = cfg.source_note;
    return dataset;
}

forecast::OptimizerConfig optimizer_config(const ScenarioConfig& cfg) {
    forecast::OptimizerConfig config;
    config.grid_steps = cfg.grid_steps;
    config.seasonal_period = cfg.seasonal_period;
    return config;
}

struct ForecastBundle {
    forecast::FitParamsResult fit;
    std::vector<forecast::FittedPoint> history; // one-step fitted values
    std::vector<forecast::FittedPoint> future;
    std::vector<std::string> warnings;
};

ForecastBundle compute_forecast(const ScenarioConfig& cfg,
                                const emissions::EmissionsDataset& dataset) {
    const auto& series = dataset.at(cfg.sector);
    ForecastBundle bundle;
    bundle.fit = forecast::fit_params(series, optimizer_config(cfg));
    bundle.history = forecast::hw_fit_filter(series, bundle.fit.params).fitted;
    bundle.future = forecast::hw_forecast(bundle.fit.state, cfg.horizon);
    for (const auto& point : bundle.future) {
        if (point.predicted < 0.0) {
            bundle.warnings.push_back(fmt::format("forecast for year {} is negative ({})",
                                                  point.year, point.predicted));
        }
    }
    return bundle;
}

std::map<std::string, forecast::BacktestReport>
compute_backtests(const ScenarioConfig& cfg, const emissions::EmissionsDataset& dataset) {
    const auto config = optimizer_config(cfg);
    // Sectors are independent; fan the fits out.
    std::map<std::string, std::future<forecast::BacktestReport>> futures;
    for (const auto& [label, series] : dataset.series) {
        futures.emplace(label, std::async(std::launch::async, [&series, &cfg, &config] {
            return forecast::backtest(series, cfg.holdout, config);
        }));
    }
    std::map<std::string, forecast::BacktestReport> reports;
    for (auto& [label, future] : futures) reports.emplace(label, future.get());
    return reports;
}

detection::RegionSet compute_regions(const ScenarioConfig& cfg) {
    const auto manifest_path = require_file(cfg.manifest_path, "manifest_path");
    const auto labels_dir = require_file(cfg.labels_dir, "labels_dir");
    if (!std::filesystem::is_directory(labels_dir)) {
        throw ConfigError(fmt::format("config field 'labels_dir': '{}' is not a directory",
                                      labels_dir.string()));
    }
    const auto manifest = detection::parse_manifest_csv(read_file(manifest_path));
    std::map<std::string, detection::ParsedLabels> labels;
    for (const auto& entry : std::filesystem::directory_iterator(labels_dir)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".txt") continue;
        const std::string image_id = entry.path().stem().string();
        try {
            labels.emplace(image_id,
                           detection::parse_label_file(read_file(entry.path()), cfg.class_map));
        } catch (const ParseError& e) {
            throw ParseError(fmt::format("{}: {}", entry.path().filename().string(), e.what()));
        }
    }
    return detection::build_region_set(manifest, labels);
}

species::Recommendation compute_recommendation(const ScenarioConfig& cfg,
                                               species::KnowledgeBase* kb_out = nullptr) {
    const auto kb_dir = require_file(cfg.kb_dir, "kb_dir");
    if (!cfg.key) missing("key");
    auto kb = species::KnowledgeBase::load_from_dir(kb_dir);
    auto recommendation = species::recommend_species(*cfg.key, kb);
    if (kb_out != nullptr) *kb_out = std::move(kb);
    return recommendation;
}

std::vector<species::SpeciesProfile> load_profiles(const ScenarioConfig& cfg) {
    const auto path = require_file(cfg.species_csv, "species_csv");
    return species::parse_species_csv(read_file(path));
}

/// Profiles for the recommended species, in recommendation order.
std::vector<species::SpeciesProfile>
select_profiles(const std::vector<std::string>& recommended,
                const std::vector<species::SpeciesProfile>& all) {
    std::vector<species::SpeciesProfile> selected;
    for (const auto& name : recommended) {
        const std::string norm = text::normalize_label(name);
        auto it = std::find_if(all.begin(), all.end(), [&](const species::SpeciesProfile& p) {
            return text::normalize_label(p.name.display) == norm ||
                   text::normalize_label(p.name.alias) == norm ||
                   text::normalize_label(p.name.full()) == norm;
        });
        if (it == all.end()) {
            throw ValidationError(fmt::format("no species profile for '{}'", name));
        }
        selected.push_back(*it);
    }
    return selected;
}

planting::Allocation build_allocation(const ScenarioConfig& cfg,
                                      const std::vector<species::SpeciesProfile>& selected) {
    if (cfg.allocation_mode == planting::Allocation::Mode::whole_area) {
        return planting::Allocation::whole_area();
    }
    std::vector<double> fractions(selected.size(), 0.0);
    std::map<std::string, double> remaining;
    for (const auto& [name, share] : cfg.allocation_fractions) {
        remaining.emplace(text::normalize_label(name), share);
    }
    for (std::size_t i = 0; i < selected.size(); ++i) {
        for (const std::string& candidate :
             {selected[i].name.display, selected[i].name.alias, selected[i].name.full()}) {
            auto it = remaining.find(text::normalize_label(candidate));
            if (it != remaining.end()) {
                fractions[i] = it->second;
                remaining.erase(it);
                break;
            }
        }
    }
    if (!remaining.empty()) {
        throw ConfigError(fmt::format(
            "config field 'allocation.fractions': '{}' is not a recommended species",
            remaining.begin()->first));
    }
    return planting::Allocation::fractional(std::move(fractions));
}

struct PlanBundle {
    planting::PlantingPlan plan;
    std::vector<species::SpeciesProfile> profiles; // aligned with plan.entries
};

PlanBundle compute_plan(const ScenarioConfig& cfg, double total_area_km2,
                        const species::Recommendation& recommendation) {
    PlanBundle bundle;
    bundle.profiles = select_profiles(recommendation.species_names, load_profiles(cfg));
    bundle.plan = planting::plan_for_area(total_area_km2, bundle.profiles,
                                          build_allocation(cfg, bundle.profiles));
    return bundle;
}

struct OffsetBundle {
    std::vector<planting::GrowthTimeline> timelines;
    offset::OffsetProjection projection;
};

OffsetBundle compute_offset(const ScenarioConfig& cfg, const ForecastBundle& fc,
                            const PlanBundle& plan) {
    const int first_forecast_year = fc.future.front().year;
    if (cfg.plant_year < first_forecast_year - 50) {
        throw ConfigError(fmt::format(
            "config field 'plant_year': {} is more than 50 years before the forecast start {}",
            cfg.plant_year, first_forecast_year));
    }

    std::vector<std::string> wanted = cfg.offset_species;
    if (wanted.empty() && !plan.plan.entries.empty()) {
        wanted.push_back(plan.plan.entries.front().species);
    }

    OffsetBundle bundle;
    const int last_year = fc.future.back().year;
    const int horizon = last_year - cfg.plant_year + 1;
    for (const auto& name : wanted) {
        const std::string norm = text::normalize_label(name);
        std::size_t index = plan.plan.entries.size();
        for (std::size_t i = 0; i < plan.plan.entries.size(); ++i) {
            const auto& p = plan.profiles[i];
            if (text::normalize_label(p.name.display) == norm ||
                text::normalize_label(p.name.alias) == norm ||
                text::normalize_label(p.name.full()) == norm) {
                index = i;
                break;
            }
        }
        if (index == plan.plan.entries.size()) {
            throw ConfigError(fmt::format(
                "config field 'offset_species': '{}' is not in the planting plan", name));
        }
        if (horizon >= 1) {
            bundle.timelines.push_back(planting::growth_timeline(
                plan.profiles[index], plan.plan.entries[index].tree_count, cfg.plant_year,
                horizon));
        }
    }
    bundle.projection = offset::project_offset(fc.future, bundle.timelines);
    return bundle;
}

// ---- artifact writers ----------------------------------------------------

std::string timeline_slug(const species::SpeciesProfile& profile) {
    const std::string base = profile.name.alias.empty() ? profile.name.display
                                                        : profile.name.alias;
    std::string slug;
    for (char c : text::normalize_label(base)) {
        slug.push_back(c == ' ' ? '_' : c);
    }
    return slug;
}

void write_ingest(ArtifactSink& sink, const emissions::EmissionsDataset& dataset) {
    ordered_json summary;
    summary["source_note"] = dataset.source_note;
    ordered_json sectors = ordered_json::object();
    for (const auto& [label, series] : dataset.series) {
        sink.write(fmt::format("sector_{}.csv", label), emissions::to_canonical_csv(series));
        ordered_json s;
        s["first_year"] = series.first_year();
        s["last_year"] = series.last_year();
        s["observations"] = series.size();
        sectors[label] = s;
    }
    summary["sectors"] = sectors;
    sink.write("ingest.json", summary.dump(2) + "\n");
}

ordered_json backtest_json(const forecast::BacktestReport& report) {
    ordered_json j;
    j["params"] = {{"alpha", sig6(report.params.alpha)}, {"beta", sig6(report.params.beta)}};
    if (report.params.gamma) {
        j["params"]["gamma"] = sig6(*report.params.gamma);
        j["params"]["seasonal_period"] = *report.params.seasonal_period;
    }
    j["sse"] = sig6(report.sse);
    j["error_rate"] = sig6(report.error_rate);
    j["error_stddev_abs"] = sig6(report.error_stddev_abs);
    j["error_stddev_relative"] = sig6(report.error_stddev_relative);
    j["warnings"] = report.warnings;
    return j;
}

std::string backtest_csv(const forecast::BacktestReport& report) {
    std::string out = "year,actual,predicted\n";
    for (const auto& row : report.rows) {
        out += fmt::format("{},{},{}\n", row.year, csv::format_number(row.actual),
                           csv::format_number(row.predicted));
    }
    return out;
}

void write_backtests(ArtifactSink& sink,
                     const std::map<std::string, forecast::BacktestReport>& reports) {
    for (const auto& [label, report] : reports) {
        sink.write(fmt::format("backtest_{}.json", label), backtest_json(report).dump(2) + "\n");
        sink.write(fmt::format("backtest_{}.csv", label), backtest_csv(report));
    }
}

void write_forecast(ArtifactSink& sink, const ScenarioConfig& cfg,
                    const emissions::EmissionsDataset& dataset, const ForecastBundle& fc) {
    const auto& series = dataset.at(cfg.sector);
    std::map<int, double> fitted;
    for (const auto& point : fc.history) fitted.emplace(point.year, point.predicted);

    std::string rows = "year,actual,predicted\n";
    for (const auto& obs : series.observations) {
        const auto it = fitted.find(obs.year);
        rows += fmt::format("{},{},{}\n", obs.year, csv::format_number(obs.value),
                            it == fitted.end() ? "" : csv::format_number(it->second));
    }
    for (const auto& point : fc.future) {
        rows += fmt::format("{},,{}\n", point.year, csv::format_number(point.predicted));
    }
    sink.write(fmt::format("forecast_{}.csv", cfg.sector), rows);

    ordered_json j;
    j["sector"] = cfg.sector;
    j["params"] = {{"alpha", sig6(fc.fit.params.alpha)}, {"beta", sig6(fc.fit.params.beta)}};
    if (fc.fit.params.gamma) {
        j["params"]["gamma"] = sig6(*fc.fit.params.gamma);
        j["params"]["seasonal_period"] = *fc.fit.params.seasonal_period;
    }
    j["sse"] = sig6(fc.fit.sse);
    j["horizon"] = cfg.horizon;
    ordered_json points = ordered_json::array();
    for (const auto& point : fc.future) {
        points.push_back({{"year", point.year}, {"predicted", sig6(point.predicted)}});
    }
    j["forecast"] = points;
    j["warnings"] = fc.warnings;
    sink.write(fmt::format("forecast_{}.json", cfg.sector), j.dump(2) + "\n");
}

void write_areas(ArtifactSink& sink, const ScenarioConfig& cfg,
                 const detection::RegionSet& regions, double total_km2) {
    std::string rows = "image_id,box_count,clamped_count,area_km2\n";
    for (const auto& [image_id, image] : regions.images) {
        double area = 0.0;
        if (cfg.merge_overlaps) {
            area = detection::merged_area_km2(image);
        } else {
            for (const auto& box : image.boxes) {
                area += detection::box_area_km2(box, image.meta);
            }
        }
        rows += fmt::format("{},{},{},{}\n", csv::escape(image_id), image.boxes.size(),
                            image.clamped_count, csv::format_number(area));
    }
    rows += fmt::format("TOTAL,{},{},{}\n", regions.box_count(), regions.clamped_count(),
                        csv::format_number(total_km2));
    sink.write("areas.csv", rows);
}

void write_recommendation(ArtifactSink& sink, const species::Recommendation& rec,
                          const species::KnowledgeBase& kb) {
    const auto gateway = species::GatewayConfig::from_env();
    const auto generated =
        species::generate_via_gateway(rec, kb.chunk_by_id(rec.source_chunk_id), gateway);

    ordered_json j;
    j["key"] = {{"humidity_mm", sig6(rec.key.humidity_mm)}, {"soil_type", rec.key.soil_type}};
    j["chunk_id"] = rec.source_chunk_id;
    j["species"] = rec.species_names;
    j["generated"] = generated.generated;
    j["warnings"] = generated.warnings;
    sink.write("recommendation.json", j.dump(2) + "\n");
    sink.write("recommendation.txt", generated.text);
}

std::string plan_csv(const planting::PlantingPlan& plan) {
    std::string rows = "tree_type,tree_count,labor_force,spacing_m2,area_m2\n";
    for (const auto& entry : plan.entries) {
        rows += fmt::format("{},{},{},{},{}\n", csv::escape(entry.species), entry.tree_count,
                            entry.labor, csv::format_number(entry.spacing_m2),
                            csv::format_number(entry.area_m2));
    }
    return rows;
}

std::string timeline_csv(const planting::GrowthTimeline& timeline) {
    std::string rows = "year,stage,o2_kg,co2_kg,yield_kg\n";
    for (const auto& row : timeline.rows) {
        rows += fmt::format("{},{},{},{},{}\n", row.year, row.stage,
                            csv::format_number(row.o2_kg), csv::format_number(row.co2_kg),
                            csv::format_number(row.yield_kg));
    }
    return rows;
}

void write_plan(ArtifactSink& sink, const ScenarioConfig& cfg, const PlanBundle& bundle) {
    sink.write("plan.csv", plan_csv(bundle.plan));
    for (std::size_t i = 0; i < bundle.plan.entries.size(); ++i) {
        const auto timeline =
            planting::growth_timeline(bundle.profiles[i], bundle.plan.entries[i].tree_count,
                                      cfg.plant_year, cfg.timeline_years);
        sink.write(fmt::format("timeline_{}.csv", timeline_slug(bundle.profiles[i])),
                   timeline_csv(timeline));
    }
}

std::string projection_csv(const offset::OffsetProjection& projection) {
    std::string rows = "year,forecast_t,o2_t,co2_seq_t,yield_t,net_t,offset_fraction\n";
    for (const auto& row : projection.rows) {
        rows += fmt::format(
            "{},{},{},{},{},{},{}\n", row.year, csv::format_number(row.forecast_t),
            csv::format_number(row.o2_t), csv::format_number(row.co2_sequestered_t),
            csv::format_number(row.yield_t), csv::format_number(row.net_t),
            row.offset_fraction ? csv::format_number(*row.offset_fraction) : "");
    }
    return rows;
}

ordered_json offset_json(const ScenarioConfig& cfg, const OffsetBundle& bundle) {
    ordered_json j;
    ordered_json names = ordered_json::array();
    for (const auto& timeline : bundle.timelines) names.push_back(timeline.species);
    j["species"] = names;
    j["plant_year"] = cfg.plant_year;
    std::optional<int> first_year;
    for (const auto& row : bundle.projection.rows) {
        if (row.co2_sequestered_t > 0.0) {
            first_year = row.year;
            break;
        }
    }
    j["first_sequestration_year"] = first_year ? ordered_json(*first_year) : nullptr;
    const auto crossover = offset::crossover_year(bundle.projection);
    j["crossover_year"] = crossover ? ordered_json(*crossover) : nullptr;
    ordered_json rows = ordered_json::array();
    for (const auto& row : bundle.projection.rows) {
        rows.push_back({{"year", row.year},
                        {"forecast_t", sig6(row.forecast_t)},
                        {"o2_t", sig6(row.o2_t)},
                        {"co2_sequestered_t", sig6(row.co2_sequestered_t)},
                        {"yield_t", sig6(row.yield_t)},
                        {"net_t", sig6(row.net_t)},
                        {"offset_fraction", json_optional(row.offset_fraction)}});
    }
    j["rows"] = rows;
    return j;
}

} // namespace

StageArtifacts run_ingest(const ScenarioConfig& cfg) {
    return with_sink(cfg, [&](ArtifactSink& sink) { write_ingest(sink, load_dataset(cfg)); });
}

StageArtifacts run_backtest(const ScenarioConfig& cfg) {
    return with_sink(cfg, [&](ArtifactSink& sink) {
        const auto dataset = load_dataset(cfg);
        write_backtests(sink, compute_backtests(cfg, dataset));
    });
}

StageArtifacts run_forecast(const ScenarioConfig& cfg) {
    return with_sink(cfg, [&](ArtifactSink& sink) {
        const auto dataset = load_dataset(cfg);
        write_forecast(sink, cfg, dataset, compute_forecast(cfg, dataset));
    });
}

StageArtifacts run_detect_area(const ScenarioConfig& cfg) {
    return with_sink(cfg, [&](ArtifactSink& sink) {
        const auto regions = compute_regions(cfg);
        write_areas(sink, cfg, regions, detection::aggregate_area(regions, cfg.merge_overlaps));
    });
}

StageArtifacts run_recommend(const ScenarioConfig& cfg) {
    return with_sink(cfg, [&](ArtifactSink& sink) {
        species::KnowledgeBase kb;
        const auto recommendation = compute_recommendation(cfg, &kb);
        write_recommendation(sink, recommendation, kb);
    });
}

StageArtifacts run_plan(const ScenarioConfig& cfg) {
    return with_sink(cfg, [&](ArtifactSink& sink) {
        const auto regions = compute_regions(cfg);
        const double area = detection::aggregate_area(regions, cfg.merge_overlaps);
        const auto recommendation = compute_recommendation(cfg);
        write_plan(sink, cfg, compute_plan(cfg, area, recommendation));
    });
}

StageArtifacts run_offset(const ScenarioConfig& cfg) {
    return with_sink(cfg, [&](ArtifactSink& sink) {
        const auto dataset = load_dataset(cfg);
        const auto fc = compute_forecast(cfg, dataset);
        const auto regions = compute_regions(cfg);
        const double area = detection::aggregate_area(regions, cfg.merge_overlaps);
        const auto recommendation = compute_recommendation(cfg);
        const auto plan = compute_plan(cfg, area, recommendation);
        const auto bundle = compute_offset(cfg, fc, plan);
        sink.write("projection.csv", projection_csv(bundle.projection));
        sink.write("offset.json", offset_json(cfg, bundle).dump(2) + "\n");
    });
}

StageArtifacts run_report(const ScenarioConfig& cfg) {
    return with_sink(cfg, [&](ArtifactSink& sink) {
        const auto dataset = load_dataset(cfg);
        const auto backtests = compute_backtests(cfg, dataset);
        const auto fc = compute_forecast(cfg, dataset);
        const auto regions = compute_regions(cfg);
        const double area = detection::aggregate_area(regions, cfg.merge_overlaps);
        species::KnowledgeBase kb;
        const auto recommendation = compute_recommendation(cfg, &kb);
        const auto plan = compute_plan(cfg, area, recommendation);
        const auto bundle = compute_offset(cfg, fc, plan);

        write_ingest(sink, dataset);
        write_backtests(sink, backtests);
        write_forecast(sink, cfg, dataset, fc);
        write_areas(sink, cfg, regions, area);
        write_recommendation(sink, recommendation, kb);
        write_plan(sink, cfg, plan);
        sink.write("projection.csv", projection_csv(bundle.projection));
        sink.write("offset.json", offset_json(cfg, bundle).dump(2) + "\n");

        ordered_json summary;
        summary["scenario"] = {{"sector", cfg.sector},
                               {"holdout", cfg.holdout},
                               {"horizon", cfg.horizon},
                               {"plant_year", cfg.plant_year},
                               {"allocation",
                                cfg.allocation_mode == planting::Allocation::Mode::whole_area
                                    ? "whole_area"
                                    : "fractional"},
                               {"source_note", cfg.source_note}};
        ordered_json sectors = ordered_json::object();
        for (const auto& [label, series] : dataset.series) {
            sectors[label] = {{"first_year", series.first_year()},
                             {"last_year", series.last_year()},
                             {"observations", series.size()}};
        }
        summary["emissions"] = sectors;
        ordered_json bt = ordered_json::object();
        for (const auto& [label, report] : backtests) bt[label] = backtest_json(report);
        summary["backtests"] = bt;

        ordered_json forecast_rows = ordered_json::array();
        for (const auto& point : fc.future) {
            forecast_rows.push_back({{"year", point.year}, {"predicted", sig6(point.predicted)}});
        }
        summary["forecast"] = {{"sector", cfg.sector},
                               {"params",
                                {{"alpha", sig6(fc.fit.params.alpha)},
                                 {"beta", sig6(fc.fit.params.beta)}}},
                               {"sse", sig6(fc.fit.sse)},
                               {"rows", forecast_rows},
                               {"warnings", fc.warnings}};

        summary["detection"] = {{"images", regions.images.size()},
                                {"boxes", regions.box_count()},
                                {"clamped", regions.clamped_count()},
                                {"total_area_km2", sig6(area)}};

        summary["recommendation"] = {{"humidity_mm", sig6(recommendation.key.humidity_mm)},
                                     {"soil_type", recommendation.key.soil_type},
                                     {"chunk_id", recommendation.source_chunk_id},
                                     {"species", recommendation.species_names}};

        ordered_json plan_rows = ordered_json::array();
        for (const auto& entry : plan.plan.entries) {
            plan_rows.push_back({{"tree_type", entry.species},
                                 {"tree_count", entry.tree_count},
                                 {"labor_force", entry.labor},
                                 {"spacing_m2", sig6(entry.spacing_m2)},
                                 {"area_m2", sig6(entry.area_m2)}});
        }
        summary["plan"] = {{"trees_per_worker", plan.plan.policy.trees_per_worker},
                           {"rows", plan_rows}};
        summary["offset"] = offset_json(cfg, bundle);
        sink.write("summary.json", summary.dump(2) + "\n");
    });
}

StageArtifacts run_stage(std::string_view name, const ScenarioConfig& cfg) {
    if (name == "ingest") return run_ingest(cfg);
    if (name == "backtest") return run_backtest(cfg);
    if (name == "forecast") return run_forecast(cfg);
    if (name == "detect-area") return run_detect_area(cfg);
    if (name == "recommend") return run_recommend(cfg);
    if (name == "plan") return run_plan(cfg);
    if (name == "offset") return run_offset(cfg);
    if (name == "report") return run_report(cfg);
    throw ArgumentError(fmt::format("unknown subcommand '{}'", name));
}

} // namespace canopy::pipeline
