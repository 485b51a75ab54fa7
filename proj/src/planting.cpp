#include "canopy/planting.hpp"

#include "canopy/errors.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>

namespace canopy::planting {

std::int64_t tree_count(double area_m2, double spacing_m2) {
    if (!(area_m2 >= 0.0) || !std::isfinite(area_m2)) {
        throw ArgumentError(fmt::format("area_m2 must be non-negative, got {}", area_m2));
    }
    if (!(spacing_m2 > 0.0) || !std::isfinite(spacing_m2)) {
        throw ArgumentError(fmt::format("spacing_m2 must be positive, got {}", spacing_m2));
    }
    const double ratio = area_m2 / spacing_m2;
    if (ratio >= 9.0e15) {
        throw ArgumentError("tree count overflows the integer range");
    }
    auto q = static_cast<std::int64_t>(std::floor(ratio));
    // The division may round across an integer boundary; fused multiply-add
    // residues decide the exact floor of the quotient of the operands.
    while (std::fma(static_cast<double>(-(q + 1)), spacing_m2, area_m2) >= 0.0) ++q;
    while (q > 0 && std::fma(static_cast<double>(-q), spacing_m2, area_m2) < 0.0) --q;
    return q;
}

std::int64_t labor_force(std::int64_t trees, const LaborPolicy& policy) {
    if (trees < 0) {
        throw ArgumentError(fmt::format("tree count must be non-negative, got {}", trees));
    }
    if (policy.trees_per_worker < 1) {
        throw ArgumentError("trees_per_worker must be at least 1");
    }
    return trees / policy.trees_per_worker;
}

double PlantingPlan::total_allotted_m2() const {
    double total = 0.0;
    for (const auto& entry : entries) total += entry.area_m2;
    return total;
}

Allocation Allocation::fractional(std::vector<double> fractions) {
    Allocation a;
    a.mode = Mode::fractional;
    a.fractions = std::move(fractions);
    return a;
}

PlantingPlan plan_for_area(double total_area_km2,
                           const std::vector<species::SpeciesProfile>& profiles,
                           const Allocation& allocation, const LaborPolicy& policy) {
    if (!(total_area_km2 >= 0.0) || !std::isfinite(total_area_km2)) {
        throw ArgumentError(fmt::format("total area must be non-negative, got {}",
                                        total_area_km2));
    }
    const double total_m2 = total_area_km2 * 1e6;

    std::vector<double> shares;
    if (allocation.mode == Allocation::Mode::fractional) {
        if (allocation.fractions.size() != profiles.size()) {
            throw ArgumentError(fmt::format(
                "{} fractions for {} species", allocation.fractions.size(), profiles.size()));
        }
        double sum = 0.0;
        for (double f : allocation.fractions) {
            if (!(f >= 0.0) || !std::isfinite(f)) {
                throw ArgumentError("fractions must be non-negative");
            }
            sum += f;
        }
        if (sum > 1.0 + 1e-9) {
            throw ArgumentError(fmt::format("fractions sum to {}, more than the whole area",
                                            sum));
        }
        shares = allocation.fractions;
    }

    PlantingPlan plan;
    plan.policy = policy;
    plan.entries.reserve(profiles.size());
    for (std::size_t i = 0; i < profiles.size(); ++i) {
        const auto& profile = profiles[i];
        profile.validate();
        PlanEntry entry;
        entry.species = profile.name.full();
        entry.spacing_m2 = profile.spacing_m2;
        entry.area_m2 = allocation.mode == Allocation::Mode::whole_area
                            ? total_m2
                            : total_m2 * shares[i];
        entry.tree_count = tree_count(entry.area_m2, profile.spacing_m2);
        entry.labor = labor_force(entry.tree_count, policy);
        plan.entries.push_back(std::move(entry));
    }
    return plan;
}

GrowthTimeline growth_timeline(const species::SpeciesProfile& profile,
                               std::int64_t tree_count, int plant_year, int horizon_years) {
    if (horizon_years < 1) {
        throw ArgumentError(fmt::format("horizon must be >= 1, got {}", horizon_years));
    }
    if (tree_count < 0) {
        throw ArgumentError(fmt::format("tree count must be non-negative, got {}", tree_count));
    }
    profile.validate();

    GrowthTimeline timeline;
    timeline.species = profile.name.full();
    timeline.plant_year = plant_year;
    timeline.tree_count = tree_count;
    timeline.rows.reserve(static_cast<std::size_t>(horizon_years));
    const auto scale = static_cast<double>(tree_count);
    for (int age = 0; age < horizon_years; ++age) {
        TimelineRow row;
        row.year = plant_year + age;
        const species::StageRates* stage = profile.stage_for_age(age);
        if (stage == nullptr) {
            row.stage = "seedling";
        } else {
            row.stage = std::string(species::to_string(stage->stage));
            row.o2_kg = stage->o2_kg_per_tree_year * scale;
            row.co2_kg = stage->co2_kg_per_tree_year * scale;
            row.yield_kg = stage->yield_kg_per_tree_year * scale;
        }
        timeline.rows.push_back(std::move(row));
    }
    return timeline;
}

} // namespace canopy::planting
