#ifndef CANOPY_EMISSIONS_HPP
#define CANOPY_EMISSIONS_HPP

#include <compare>
#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace canopy::emissions {

enum class SectorKind { oil, coal, cement, gas, flaring, other };

/// Emitting sector. The five named kinds cover the bundled dataset; anything
/// else is carried as `other` with its label preserved.
struct Sector {
    SectorKind kind = SectorKind::other;
    std::string custom_name; // set only for SectorKind::other

    static Sector from_label(std::string_view label);
    std::string label() const;

    friend bool operator==(const Sector&, const Sector&) = default;
};

struct Observation {
    int year = 0;
    double value = 0.0; // tonnes CO2 per year

    friend bool operator==(const Observation&, const Observation&) = default;
};

/// One sector's annual series. After validation the years are strictly
/// increasing with no gaps and every value is finite and non-negative.
struct SectorSeries {
    Sector sector;
    std::vector<Observation> observations;

    std::size_t size() const { return observations.size(); }
    int first_year() const { return observations.front().year; }
    int last_year() const { return observations.back().year; }
    std::vector<double> values() const;

    /// Enforces the type invariants. `min_size` defaults to the two
    /// observations any modeling use requires; split products may be shorter.
    void validate(std::size_t min_size = 2) const;
};

struct EmissionsDataset {
    std::map<std::string, SectorSeries> series; // keyed by sector label
    std::string source_note;

    const SectorSeries& at(std::string_view sector_label) const;
};

/// Header-name -> sector assignment for parse_emissions_table.
using ColumnMap = std::map<std::string, Sector>;

/// Parse a year-by-sector table. The header row must lead with a `Year`
/// column; `column_map` names the value columns to ingest. Comma thousands
/// separators are accepted both quoted ("22,399,392") and unquoted, where the
/// groups-of-three structure makes the reading unambiguous. Rows are sorted
/// by year before validation.
EmissionsDataset parse_emissions_table(std::string_view rows, const ColumnMap& column_map);

/// Final `holdout` observations become the test set, everything before them
/// the train set. Throws ArgumentError unless 1 <= holdout < series length.
std::pair<SectorSeries, SectorSeries> split_train_test(const SectorSeries& series,
                                                       std::size_t holdout = 6);

/// Canonical `year,value` CSV with a header row.
std::string to_canonical_csv(const SectorSeries& series);

/// Inverse of to_canonical_csv for a single sector.
SectorSeries parse_canonical_csv(std::string_view content, const Sector& sector);

} // namespace canopy::emissions

#endif
