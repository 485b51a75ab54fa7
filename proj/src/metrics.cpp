#include "canopy/metrics.hpp"

#include "canopy/errors.hpp"

namespace canopy {

ClassificationMetrics metrics_from_confusion(std::int64_t tp, std::int64_t fp,
                                             std::int64_t fn, std::int64_t tn) {
    if (tp < 0 || fp < 0 || fn < 0 || tn < 0) {
        throw ArgumentError("confusion counts must be non-negative");
    }
    const std::int64_t total = tp + fp + fn + tn;
    if (total == 0) {
        throw ArgumentError("metrics undefined for an empty universe");
    }
    ClassificationMetrics m;
    m.accuracy_pct = 100.0 * static_cast<double>(tp + tn) / static_cast<double>(total);
    if (tp + fp > 0) {
        m.precision_pct = 100.0 * static_cast<double>(tp) / static_cast<double>(tp + fp);
    }
    if (tp + fn > 0) {
        m.recall_pct = 100.0 * static_cast<double>(tp) / static_cast<double>(tp + fn);
    }
    return m;
}

} // namespace canopy
