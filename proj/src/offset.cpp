#include "canopy/offset.hpp"

#include "canopy/errors.hpp"

#include <fmt/format.h>

#include <map>
#include <set>

namespace canopy::offset {

OffsetProjection project_offset(const std::vector<forecast::FittedPoint>& forecast_rows,
                                const std::vector<planting::GrowthTimeline>& timelines) {
    std::set<int> forecast_years;
    for (const auto& point : forecast_rows) {
        if (!forecast_years.insert(point.year).second) {
            throw ArgumentError(fmt::format("duplicate forecast year {}", point.year));
        }
    }

    struct Production {
        double o2_kg = 0.0;
        double co2_kg = 0.0;
        double yield_kg = 0.0;
    };
    std::map<int, Production> by_year;
    for (const auto& timeline : timelines) {
        std::set<int> seen;
        for (const auto& row : timeline.rows) {
            if (!seen.insert(row.year).second) {
                throw ArgumentError(fmt::format("timeline '{}' repeats year {}",
                                                timeline.species, row.year));
            }
            auto& agg = by_year[row.year];
            agg.o2_kg += row.o2_kg;
            agg.co2_kg += row.co2_kg;
            agg.yield_kg += row.yield_kg;
        }
    }

    OffsetProjection projection;
    projection.rows.reserve(forecast_rows.size());
    for (const auto& point : forecast_rows) {
        ProjectionRow row;
        row.year = point.year;
        row.forecast_t = point.predicted;
        if (auto it = by_year.find(point.year); it != by_year.end()) {
            row.o2_t = it->second.o2_kg / 1000.0;
            row.co2_sequestered_t = it->second.co2_kg / 1000.0;
            row.yield_t = it->second.yield_kg / 1000.0;
        }
        row.net_t = row.forecast_t - row.co2_sequestered_t;
        if (row.forecast_t > 0.0) {
            row.offset_fraction = row.co2_sequestered_t / row.forecast_t;
        }
        projection.rows.push_back(row);
    }
    return projection;
}

std::optional<int> crossover_year(const OffsetProjection& projection) {
    for (const auto& row : projection.rows) {
        if (row.offset_fraction && *row.offset_fraction >= 1.0) return row.year;
    }
    return std::nullopt;
}

} // namespace canopy::offset
