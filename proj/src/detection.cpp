#include "canopy/detection.hpp"

#include "canopy/csv.hpp"
#include "canopy/errors.hpp"
#include "canopy/text.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

namespace canopy::detection {

namespace {

std::optional<double> parse_double(std::string_view s) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

std::optional<int> parse_int(std::string_view s) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

// Clamp the box extent into [0,1]; returns true if anything moved.
bool clamp_box(DetectionBox& box) {
    double x1 = box.cx - box.w / 2.0;
    double x2 = box.cx + box.w / 2.0;
    double y1 = box.cy - box.h / 2.0;
    double y2 = box.cy + box.h / 2.0;
    const bool outside = x1 < 0.0 || y1 < 0.0 || x2 > 1.0 || y2 > 1.0;
    if (outside) {
        x1 = std::clamp(x1, 0.0, 1.0);
        x2 = std::clamp(x2, 0.0, 1.0);
        y1 = std::clamp(y1, 0.0, 1.0);
        y2 = std::clamp(y2, 0.0, 1.0);
        box.cx = (x1 + x2) / 2.0;
        box.cy = (y1 + y2) / 2.0;
        box.w = x2 - x1;
        box.h = y2 - y1;
    }
    return outside;
}

double kahan_sum(const std::vector<double>& xs) {
    double sum = 0.0;
    double carry = 0.0;
    for (double x : xs) {
        const double y = x - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    return sum;
}

} // namespace

const ClassMap& default_class_map() {
    static const ClassMap map{{0, "suitable_place"}};
    return map;
}

void ImageMeta::validate() const {
    if (image_id.empty()) throw ValidationError("image_id is empty");
    if (width_px < 1 || height_px < 1) {
        throw ValidationError(fmt::format("image '{}': dimensions must be >= 1 px", image_id));
    }
    if (!(px_per_km > 0.0) || !std::isfinite(px_per_km)) {
        throw ValidationError(fmt::format("image '{}': px_per_km must be positive", image_id));
    }
}

ParsedLabels parse_label_file(std::string_view text, const ClassMap& classes) {
    ParsedLabels out;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        std::string_view line = nl == std::string_view::npos ? text.substr(pos)
                                                             : text.substr(pos, nl - pos);
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        const std::string trimmed = text::trim(line);
        if (!trimmed.empty()) {
            std::istringstream fields(trimmed);
            std::vector<std::string> tok;
            for (std::string f; fields >> f;) tok.push_back(f);
            if (tok.size() != 5 && tok.size() != 6) {
                throw ParseError(fmt::format("line {}: expected 5 or 6 fields, found {}",
                                             line_no, tok.size()));
            }
            DetectionBox box;
            if (auto idx = parse_int(tok[0])) {
                auto it = classes.find(*idx);
                if (it == classes.end()) {
                    throw ParseError(fmt::format("line {}: unmapped class index {}",
                                                 line_no, *idx));
                }
                box.class_label = it->second;
            } else {
                box.class_label = tok[0];
            }
            const char* names[] = {"cx", "cy", "w", "h"};
            double vals[4];
            for (int i = 0; i < 4; ++i) {
                auto v = parse_double(tok[static_cast<std::size_t>(i) + 1]);
                if (!v || !std::isfinite(*v)) {
                    throw ParseError(fmt::format("line {}: field {} is not a number: '{}'",
                                                 line_no, names[i],
                                                 tok[static_cast<std::size_t>(i) + 1]));
                }
                vals[i] = *v;
            }
            box.cx = vals[0];
            box.cy = vals[1];
            box.w = vals[2];
            box.h = vals[3];
            if (box.cx < 0.0 || box.cx > 1.0 || box.cy < 0.0 || box.cy > 1.0) {
                throw ParseError(fmt::format("line {}: box center outside [0,1]", line_no));
            }
            if (box.w <= 0.0 || box.h <= 0.0 || box.w > 1.0 || box.h > 1.0) {
                throw ParseError(fmt::format("line {}: box size outside (0,1]", line_no));
            }
            if (tok.size() == 6) {
                auto c = parse_double(tok[5]);
                if (!c || !(*c >= 0.0 && *c <= 1.0)) {
                    throw ParseError(fmt::format("line {}: confidence outside [0,1]: '{}'",
                                                 line_no, tok[5]));
                }
                box.confidence = *c;
            }
            if (clamp_box(box)) ++out.clamped_count;
            out.boxes.push_back(std::move(box));
        }
        if (nl == std::string_view::npos) break;
        pos = nl + 1;
    }
    return out;
}

std::string serialize_label_file(const std::vector<DetectionBox>& boxes,
                                 const ClassMap& classes) {
    std::string out;
    for (const auto& box : boxes) {
        std::string cls = box.class_label;
        for (const auto& [idx, label] : classes) {
            if (label == box.class_label) {
                cls = fmt::format("{}", idx);
                break;
            }
        }
        out += fmt::format("{} {} {} {} {}", cls, box.cx, box.cy, box.w, box.h);
        if (box.confidence) out += fmt::format(" {}", *box.confidence);
        out += '\n';
    }
    return out;
}

double box_area_km2(const DetectionBox& box, const ImageMeta& meta) {
    meta.validate();
    return (box.w * meta.width_px / meta.px_per_km) *
           (box.h * meta.height_px / meta.px_per_km);
}

int RegionSet::box_count() const {
    int n = 0;
    for (const auto& [id, image] : images) n += static_cast<int>(image.boxes.size());
    return n;
}

int RegionSet::clamped_count() const {
    int n = 0;
    for (const auto& [id, image] : images) n += image.clamped_count;
    return n;
}

RegionSet build_region_set(const std::vector<ImageMeta>& manifest,
                           const std::map<std::string, ParsedLabels>& labels_by_image) {
    RegionSet set;
    for (const auto& meta : manifest) {
        meta.validate();
        auto [it, inserted] = set.images.try_emplace(meta.image_id, ImageRegions{meta, {}, 0});
        if (!inserted) {
            throw ValidationError(fmt::format("duplicate manifest entry for image '{}'",
                                              meta.image_id));
        }
    }
    for (const auto& [image_id, labels] : labels_by_image) {
        auto it = set.images.find(image_id);
        if (it == set.images.end()) {
            throw ArgumentError(fmt::format("labels reference image '{}' missing from manifest",
                                            image_id));
        }
        it->second.boxes = labels.boxes;
        it->second.clamped_count = labels.clamped_count;
    }
    return set;
}

double merged_area_km2(const ImageRegions& image) {
    image.meta.validate();
    if (image.boxes.empty()) return 0.0;
    std::vector<double> xs;
    std::vector<double> ys;
    struct Rect {
        double x1, x2, y1, y2;
    };
    std::vector<Rect> rects;
    for (const auto& box : image.boxes) {
        Rect r{box.cx - box.w / 2.0, box.cx + box.w / 2.0, box.cy - box.h / 2.0,
               box.cy + box.h / 2.0};
        rects.push_back(r);
        xs.push_back(r.x1);
        xs.push_back(r.x2);
        ys.push_back(r.y1);
        ys.push_back(r.y2);
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    std::sort(ys.begin(), ys.end());
    ys.erase(std::unique(ys.begin(), ys.end()), ys.end());

    double covered = 0.0; // normalized units
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        for (std::size_t j = 0; j + 1 < ys.size(); ++j) {
            const double mx = (xs[i] + xs[i + 1]) / 2.0;
            const double my = (ys[j] + ys[j + 1]) / 2.0;
            const bool inside = std::any_of(rects.begin(), rects.end(), [&](const Rect& r) {
                return mx >= r.x1 && mx <= r.x2 && my >= r.y1 && my <= r.y2;
            });
            if (inside) covered += (xs[i + 1] - xs[i]) * (ys[j + 1] - ys[j]);
        }
    }
    const double kx = image.meta.width_px / image.meta.px_per_km;
    const double ky = image.meta.height_px / image.meta.px_per_km;
    return covered * kx * ky;
}

double aggregate_area(const RegionSet& regions, bool merge_overlaps) {
    std::vector<double> areas;
    for (const auto& [id, image] : regions.images) {
        if (merge_overlaps) {
            areas.push_back(merged_area_km2(image));
        } else {
            for (const auto& box : image.boxes) {
                areas.push_back(box_area_km2(box, image.meta));
            }
        }
    }
    return kahan_sum(areas);
}

ClassificationMetrics image_level_metrics(const std::set<std::string>& predicted_positive,
                                          const std::set<std::string>& truth_positive,
                                          const std::set<std::string>& all_images) {
    if (all_images.empty()) {
        throw ArgumentError("all_images must be nonempty");
    }
    for (const auto& id : predicted_positive) {
        if (!all_images.contains(id)) {
            throw ArgumentError(fmt::format("predicted image '{}' not in the evaluated set", id));
        }
    }
    for (const auto& id : truth_positive) {
        if (!all_images.contains(id)) {
            throw ArgumentError(fmt::format("truth image '{}' not in the evaluated set", id));
        }
    }
    std::int64_t tp = 0, fp = 0, fn = 0, tn = 0;
    for (const auto& id : all_images) {
        const bool pred = predicted_positive.contains(id);
        const bool truth = truth_positive.contains(id);
        if (pred && truth) ++tp;
        else if (pred) ++fp;
        else if (truth) ++fn;
        else ++tn;
    }
    return metrics_from_confusion(tp, fp, fn, tn);
}

std::vector<ImageMeta> parse_manifest_csv(std::string_view content) {
    const auto table = csv::parse(content);
    if (table.empty() || table.front().size() < 3 ||
        text::normalize_label(table.front()[0]) != "image_id") {
        throw ParseError("manifest: missing header 'image_id,width_px,height_px,px_per_km'");
    }
    std::vector<ImageMeta> out;
    for (std::size_t r = 1; r < table.size(); ++r) {
        const auto& row = table[r];
        const std::size_t row_no = r + 1;
        if (row.size() < 3 || row.size() > 4) {
            throw ParseError(fmt::format("manifest row {}: expected 3 or 4 columns", row_no));
        }
        ImageMeta meta;
        meta.image_id = row[0];
        auto wpx = parse_int(row[1]);
        auto hpx = parse_int(row[2]);
        if (!wpx || !hpx) {
            throw ParseError(fmt::format("manifest row {}: bad pixel dimensions", row_no));
        }
        meta.width_px = *wpx;
        meta.height_px = *hpx;
        if (row.size() == 4 && !row[3].empty()) {
            auto ppk = parse_double(row[3]);
            if (!ppk) {
                throw ParseError(fmt::format("manifest row {}: bad px_per_km", row_no));
            }
            meta.px_per_km = *ppk;
        }
        meta.validate();
        out.push_back(std::move(meta));
    }
    return out;
}

} // namespace canopy::detection
