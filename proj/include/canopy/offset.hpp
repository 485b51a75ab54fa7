#ifndef CANOPY_OFFSET_HPP
#define CANOPY_OFFSET_HPP

#include "canopy/forecast.hpp"
#include "canopy/planting.hpp"

#include <optional>
#include <vector>

namespace canopy::offset {

/// One projection year. Tonne-scale throughout; timelines arrive in kg and
/// are converted at the join. offset_fraction is absent when the forecast
/// is not positive.
struct ProjectionRow {
    int year = 0;
    double forecast_t = 0.0;
    double o2_t = 0.0;
    double co2_sequestered_t = 0.0;
    double yield_t = 0.0;
    double net_t = 0.0; // forecast - sequestered
    std::optional<double> offset_fraction;
};

struct OffsetProjection {
    std::vector<ProjectionRow> rows;
};

/// Outer-join the forecast with the summed timelines on year. Years outside
/// a timeline contribute zero sequestration; years absent from the forecast
/// are dropped. Duplicate years within one input raise ArgumentError.
OffsetProjection project_offset(const std::vector<forecast::FittedPoint>& forecast_rows,
                                const std::vector<planting::GrowthTimeline>& timelines);

/// First year whose offset fraction reaches 1, if any.
std::optional<int> crossover_year(const OffsetProjection& projection);

} // namespace canopy::offset

#endif
