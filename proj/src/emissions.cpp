#include "canopy/emissions.hpp"

#include "canopy/csv.hpp"
#include "canopy/errors.hpp"
#include "canopy/text.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>

namespace canopy::emissions {

namespace {

bool all_digits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) {
        return std::isdigit(c) != 0;
    });
}

// A cell that can open a number: optional sign, digits, optional fraction.
bool numeric_head(std::string_view s) {
    if (!s.empty() && (s[0] == '+' || s[0] == '-')) s.remove_prefix(1);
    if (s.empty()) return false;
    std::size_t dot = s.find('.');
    std::string_view intpart = dot == std::string_view::npos ? s : s.substr(0, dot);
    std::string_view frac = dot == std::string_view::npos ? "" : s.substr(dot + 1);
    if (!all_digits(intpart)) return false;
    return dot == std::string_view::npos || all_digits(frac);
}

// A cell that can continue a thousands-grouped number: exactly three digits,
// optionally followed by a fraction on the final group.
bool numeric_tail(std::string_view s) {
    std::size_t dot = s.find('.');
    std::string_view intpart = dot == std::string_view::npos ? s : s.substr(0, dot);
    if (intpart.size() != 3 || !all_digits(intpart)) return false;
    return dot == std::string_view::npos || all_digits(s.substr(dot + 1));
}

// When unquoted thousands separators split a row into more cells than the
// header defines, regroup them. The year column never carries separators, so
// the first cell stands alone; only a uniquely decodable tail is accepted.
std::vector<std::string> regroup_cells(const std::vector<std::string>& all_cells,
                                       std::size_t expected_with_year, std::size_t row_no) {
    const std::vector<std::string> cells(all_cells.begin() + 1, all_cells.end());
    const std::size_t expected = expected_with_year - 1;
    const std::size_t n = cells.size();
    // ways[i][g]: number of ways (capped at 2) to split cells[i..) into g groups
    std::vector<std::vector<int>> ways(n + 1, std::vector<int>(expected + 1, 0));
    ways[n][0] = 1;
    for (std::size_t i = n; i-- > 0;) {
        for (std::size_t g = 1; g <= expected; ++g) {
            if (!numeric_head(cells[i])) {
                // A non-numeric cell can only stand alone.
                ways[i][g] = ways[i + 1][g - 1];
                continue;
            }
            int total = 0;
            std::size_t j = i;
            while (true) {
                total += ways[j + 1][g - 1];
                if (total > 2) total = 2;
                if (j + 1 >= n || !numeric_tail(cells[j + 1])) break;
                ++j;
            }
            ways[i][g] = total;
        }
    }
    if (ways[0][expected] == 0) {
        throw ParseError(fmt::format(
            "row {}: expected {} columns, found {} and no thousands regrouping fits",
            row_no, expected, n));
    }
    if (ways[0][expected] > 1) {
        throw ParseError(fmt::format(
            "row {}: ambiguous unquoted thousands separators; quote the values",
            row_no));
    }
    std::vector<std::string> out;
    out.push_back(all_cells.front());
    std::size_t i = 0;
    for (std::size_t g = expected; g > 0; --g) {
        std::string cell = cells[i];
        std::size_t j = i;
        while (ways[j + 1][g - 1] == 0) {
            ++j;
            cell += cells[j];
        }
        out.push_back(std::move(cell));
        i = j + 1;
    }
    return out;
}

int parse_year(std::string_view cell, std::size_t row_no) {
    int year = 0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), year);
    if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
        throw ParseError(fmt::format("row {}, column Year: not an integer year: '{}'",
                                     row_no, cell));
    }
    return year;
}

double parse_value(std::string_view cell, std::size_t row_no, const std::string& column) {
    std::string digits;
    digits.reserve(cell.size());
    for (char c : cell) {
        if (c == ',') continue; // thousands separator
        digits.push_back(c);
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
    if (ec != std::errc{} || ptr != digits.data() + digits.size()) {
        throw ParseError(fmt::format("row {}, column '{}': not a number: '{}'",
                                     row_no, column, cell));
    }
    return v;
}

} // namespace

Sector Sector::from_label(std::string_view label) {
    const std::string norm = text::normalize_label(label);
    if (norm == "oil") return {SectorKind::oil, {}};
    if (norm == "coal") return {SectorKind::coal, {}};
    if (norm == "cement") return {SectorKind::cement, {}};
    if (norm == "gas") return {SectorKind::gas, {}};
    if (norm == "flaring") return {SectorKind::flaring, {}};
    if (norm.empty()) throw ArgumentError("sector label is empty");
    return {SectorKind::other, norm};
}

std::string Sector::label() const {
    switch (kind) {
    case SectorKind::oil: return "oil";
    case SectorKind::coal: return "coal";
    case SectorKind::cement: return "cement";
    case SectorKind::gas: return "gas";
    case SectorKind::flaring: return "flaring";
    case SectorKind::other: return custom_name;
    }
    return custom_name;
}

std::vector<double> SectorSeries::values() const {
    std::vector<double> out;
    out.reserve(observations.size());
    for (const auto& obs : observations) out.push_back(obs.value);
    return out;
}

void SectorSeries::validate(std::size_t min_size) const {
    if (observations.size() < min_size) {
        throw ValidationError(fmt::format("series '{}' too short: {} observation(s), need {}",
                                          sector.label(), observations.size(), min_size));
    }
    for (std::size_t i = 0; i < observations.size(); ++i) {
        const auto& obs = observations[i];
        if (!std::isfinite(obs.value)) {
            throw ValidationError(fmt::format("series '{}', year {}: non-finite value",
                                              sector.label(), obs.year));
        }
        if (obs.value < 0.0) {
            throw ValidationError(fmt::format("series '{}', year {}: negative value {}",
                                              sector.label(), obs.year, obs.value));
        }
        if (i > 0) {
            int prev = observations[i - 1].year;
            if (obs.year == prev) {
                throw ValidationError(fmt::format("series '{}': duplicate year {}",
                                                  sector.label(), obs.year));
            }
            if (obs.year != prev + 1) {
                throw ValidationError(fmt::format("series '{}': year gap between {} and {}",
                                                  sector.label(), prev, obs.year));
            }
        }
    }
}

const SectorSeries& EmissionsDataset::at(std::string_view sector_label) const {
    auto it = series.find(text::normalize_label(sector_label));
    if (it == series.end()) {
        throw ArgumentError(fmt::format("no series for sector '{}'", sector_label));
    }
    return it->second;
}

EmissionsDataset parse_emissions_table(std::string_view rows, const ColumnMap& column_map) {
    const auto table = csv::parse(rows);
    if (table.empty()) {
        throw ParseError("missing header row");
    }
    const auto& header = table.front();
    if (header.empty() || text::normalize_label(header[0]) != "year") {
        throw ParseError("missing header: first column must be 'Year'");
    }
    if (column_map.empty()) {
        throw ArgumentError("column map is empty");
    }

    // header name -> column index
    std::vector<std::pair<std::size_t, Sector>> columns; // (index, sector)
    for (const auto& [name, sector] : column_map) {
        auto it = std::find_if(header.begin(), header.end(), [&](const std::string& h) {
            return text::normalize_label(h) == text::normalize_label(name);
        });
        if (it == header.end()) {
            throw ParseError(fmt::format("missing header '{}'", name));
        }
        columns.emplace_back(static_cast<std::size_t>(it - header.begin()), sector);
    }
    std::sort(columns.begin(), columns.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 1; i < columns.size(); ++i) {
        if (columns[i].first == columns[i - 1].first) {
            throw ArgumentError("two column-map entries name the same header");
        }
    }

    EmissionsDataset dataset;
    std::map<std::string, std::vector<Observation>> rows_by_sector;
    for (const auto& [idx, sector] : columns) {
        (void)idx;
        auto [it, inserted] = rows_by_sector.try_emplace(sector.label());
        if (!inserted) {
            throw ArgumentError(fmt::format("duplicate sector '{}' in column map",
                                            sector.label()));
        }
        dataset.series.emplace(sector.label(), SectorSeries{sector, {}});
    }

    for (std::size_t r = 1; r < table.size(); ++r) {
        std::vector<std::string> cells = table[r];
        const std::size_t row_no = r + 1; // 1-based, counting the header
        if (cells.size() > header.size()) {
            cells = regroup_cells(cells, header.size(), row_no);
        }
        if (cells.size() != header.size()) {
            throw ParseError(fmt::format("row {}: expected {} columns, found {}",
                                         row_no, header.size(), cells.size()));
        }
        const int year = parse_year(cells[0], row_no);
        for (const auto& [idx, sector] : columns) {
            const double value = parse_value(cells[idx], row_no, header[idx]);
            rows_by_sector[sector.label()].push_back({year, value});
        }
    }

    for (auto& [label, observations] : rows_by_sector) {
        std::sort(observations.begin(), observations.end(),
                  [](const Observation& a, const Observation& b) { return a.year < b.year; });
        auto& s = dataset.series.at(label);
        s.observations = std::move(observations);
        s.validate(1); // modeling entry points enforce the >= 2 floor themselves
    }
    return dataset;
}

std::pair<SectorSeries, SectorSeries> split_train_test(const SectorSeries& series,
                                                       std::size_t holdout) {
    if (holdout < 1) {
        throw ArgumentError("holdout must be at least 1");
    }
    if (holdout >= series.size()) {
        throw ArgumentError(fmt::format("holdout {} must be smaller than series length {}",
                                        holdout, series.size()));
    }
    const std::size_t cut = series.size() - holdout;
    SectorSeries train{series.sector,
                       {series.observations.begin(), series.observations.begin() + cut}};
    SectorSeries test{series.sector,
                      {series.observations.begin() + cut, series.observations.end()}};
    return {std::move(train), std::move(test)};
}

std::string to_canonical_csv(const SectorSeries& series) {
    std::string out = "year,value\n";
    for (const auto& obs : series.observations) {
        out += fmt::format("{},{}\n", obs.year, csv::format_number(obs.value));
    }
    return out;
}

SectorSeries parse_canonical_csv(std::string_view content, const Sector& sector) {
    const auto table = csv::parse(content);
    if (table.empty() || table.front().size() < 2 ||
        text::normalize_label(table.front()[0]) != "year") {
        throw ParseError("missing header: expected 'year,value'");
    }
    SectorSeries series{sector, {}};
    for (std::size_t r = 1; r < table.size(); ++r) {
        const std::size_t row_no = r + 1;
        if (table[r].size() != 2) {
            throw ParseError(fmt::format("row {}: expected 2 columns", row_no));
        }
        series.observations.push_back({parse_year(table[r][0], row_no),
                                       parse_value(table[r][1], row_no, "value")});
    }
    series.validate(1);
    return series;
}

} // namespace canopy::emissions
