#ifndef CANOPY_METRICS_HPP
#define CANOPY_METRICS_HPP

#include <cstdint>
#include <optional>

namespace canopy {

/// Percent-scale classification metrics. Precision is absent when no
/// positives were predicted, recall when the truth set is empty; neither is
/// ever reported as a silent zero.
struct ClassificationMetrics {
    double accuracy_pct = 0.0;
    std::optional<double> precision_pct;
    std::optional<double> recall_pct;
};

/// accuracy = (TP+TN)/total * 100, precision = TP/(TP+FP) * 100,
/// recall = TP/(TP+FN) * 100. Throws ArgumentError when all counts are zero.
ClassificationMetrics metrics_from_confusion(std::int64_t tp, std::int64_t fp,
                                             std::int64_t fn, std::int64_t tn);

} // namespace canopy

#endif
