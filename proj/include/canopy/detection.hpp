#ifndef CANOPY_DETECTION_HPP
#define CANOPY_DETECTION_HPP

#include "canopy/metrics.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace canopy::detection {

struct GeoPoint {
    double lat = 0.0;
    double lon = 0.0;
};

struct ImageMeta {
    std::string image_id;
    int width_px = 0;
    int height_px = 0;
    double px_per_km = 1400.0;
    std::vector<GeoPoint> geo_hint;

    void validate() const;
};

/// Normalized center/size detection rectangle, fractions of the image dims.
struct DetectionBox {
    std::string class_label;
    double cx = 0.0;
    double cy = 0.0;
    double w = 0.0;
    double h = 0.0;
    std::optional<double> confidence;

    friend bool operator==(const DetectionBox&, const DetectionBox&) = default;
};

/// Integer class index -> label, for label files that use indices.
using ClassMap = std::map<int, std::string>;

const ClassMap& default_class_map(); // {0: "suitable_place"}

struct ParsedLabels {
    std::vector<DetectionBox> boxes;
    int clamped_count = 0; // boxes that extended past the image bounds
};

/// One box per line: `class cx cy w h [confidence]`, whitespace-separated,
/// coordinates normalized. Boxes reaching outside [0,1] are clamped and
/// counted. Empty input parses to an empty list.
ParsedLabels parse_label_file(std::string_view text, const ClassMap& classes = default_class_map());

/// Inverse of parse_label_file; numbers round-trip exactly.
std::string serialize_label_file(const std::vector<DetectionBox>& boxes,
                                 const ClassMap& classes = default_class_map());

/// area = (w * width_px / px_per_km) * (h * height_px / px_per_km)
double box_area_km2(const DetectionBox& box, const ImageMeta& meta);

struct ImageRegions {
    ImageMeta meta;
    std::vector<DetectionBox> boxes;
    int clamped_count = 0;
};

/// Detections grouped per image, keyed by image id.
struct RegionSet {
    std::map<std::string, ImageRegions> images;

    int box_count() const;
    int clamped_count() const;
};

/// Pair label files with their metadata. A label entry without a manifest
/// row is an ArgumentError; a manifest row without labels is an image with
/// zero detections.
RegionSet build_region_set(const std::vector<ImageMeta>& manifest,
                           const std::map<std::string, ParsedLabels>& labels_by_image);

/// Total detected area. Boxes are summed as-is by default; with
/// merge_overlaps the per-image rectilinear union is used instead.
/// Summation is compensated, so ordering effects stay below 1e-9.
double aggregate_area(const RegionSet& regions, bool merge_overlaps = false);

/// Rectilinear union of one image's boxes via coordinate sweep.
double merged_area_km2(const ImageRegions& image);

/// Image-level confusion metrics: an image counts as correct when its
/// predicted suitable/unsuitable classification matches the truth.
ClassificationMetrics image_level_metrics(const std::set<std::string>& predicted_positive,
                                          const std::set<std::string>& truth_positive,
                                          const std::set<std::string>& all_images);

/// Manifest CSV: `image_id,width_px,height_px,px_per_km` with a header row.
std::vector<ImageMeta> parse_manifest_csv(std::string_view content);

} // namespace canopy::detection

#endif
