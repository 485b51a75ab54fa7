#ifndef CANOPY_PLANTING_HPP
#define CANOPY_PLANTING_HPP

#include "canopy/species.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace canopy::planting {

/// Trees reaching the productive stage takes this many years after planting.
inline constexpr int kProductiveAgeYears = 5;

struct LaborPolicy {
    std::int64_t trees_per_worker = 50; // per planting campaign
    std::string campaign_note = "one worker plants 50 trees over a three-month season";
};

/// floor(area / spacing), exact with respect to the double operands. A
/// result within rounding distance of an integer is corrected so that the
/// floor matches exact rational arithmetic on the inputs.
std::int64_t tree_count(double area_m2, double spacing_m2);

/// floor(trees / trees_per_worker).
std::int64_t labor_force(std::int64_t trees, const LaborPolicy& policy = {});

struct PlanEntry {
    std::string species;
    double area_m2 = 0.0;
    std::int64_t tree_count = 0;
    std::int64_t labor = 0;
    double spacing_m2 = 0.0;
};

/// In whole-area mode the entries are per-species alternatives over the same
/// ground, so only fractional plans keep the allotted sum within the total.
struct PlantingPlan {
    std::vector<PlanEntry> entries;
    LaborPolicy policy;

    double total_allotted_m2() const;
};

/// How the detected area is handed to the species list. whole_area sizes
/// every species over the full area independently (alternative scenarios,
/// the layout reports use); fractional divides it, fractions summing <= 1.
struct Allocation {
    enum class Mode { whole_area, fractional };
    Mode mode = Mode::whole_area;
    std::vector<double> fractions; // aligned with the species list

    static Allocation whole_area() { return {}; }
    static Allocation fractional(std::vector<double> fractions);
};

PlantingPlan plan_for_area(double total_area_km2,
                           const std::vector<species::SpeciesProfile>& profiles,
                           const Allocation& allocation = Allocation::whole_area(),
                           const LaborPolicy& policy = {});

struct TimelineRow {
    int year = 0;
    std::string stage; // "seedling" before the productive age
    double o2_kg = 0.0;
    double co2_kg = 0.0;
    double yield_kg = 0.0;
};

struct GrowthTimeline {
    std::string species;
    int plant_year = 0;
    std::int64_t tree_count = 0;
    std::vector<TimelineRow> rows;
};

/// Per-year production scaled by tree count over calendar years
/// [plant_year, plant_year + horizon). Ages below the first stage produce
/// zeros; ages past a closed final stage raise ValidationError.
GrowthTimeline growth_timeline(const species::SpeciesProfile& profile,
                               std::int64_t tree_count, int plant_year, int horizon_years);

} // namespace canopy::planting

#endif
