#include "canopy/emissions.hpp"

#include "canopy/errors.hpp"

#include <doctest.h>

#include <random>

using namespace canopy;
using emissions::ColumnMap;
using emissions::Sector;
using emissions::SectorSeries;

namespace {

ColumnMap oil_map() {
    return {{"Annual CO₂ emissions from oil", Sector::from_label("oil")}};
}

SectorSeries make_series(int first_year, const std::vector<double>& values) {
    SectorSeries s{Sector::from_label("cement"), {}};
    for (std::size_t i = 0; i < values.size(); ++i) {
        s.observations.push_back({first_year + static_cast<int>(i), values[i]});
    }
    return s;
}

} // namespace

TEST_CASE("parses the single-column table with unquoted thousands separators") {
    const auto ds = emissions::parse_emissions_table(
        "Year, Annual CO₂ emissions from oil\n1990, 22,399,392\n", oil_map());
    const auto& series = ds.at("oil");
    REQUIRE(series.size() == 1);
    CHECK(series.observations[0].year == 1990);
    CHECK(series.observations[0].value == 22399392.0);
}

TEST_CASE("parses quoted thousands separators in any column count") {
    ColumnMap map = oil_map();
    map.emplace("Annual CO₂ emissions from cement", Sector::from_label("cement"));
    const auto ds = emissions::parse_emissions_table(
        "Year,Annual CO₂ emissions from oil,Annual CO₂ emissions from cement\n"
        "1990,\"22,399,392\",\"477,970\"\n"
        "1991,\"22,534,228\",\"466,890\"\n",
        map);
    CHECK(ds.at("oil").observations[0].value == 22399392.0);
    CHECK(ds.at("cement").observations[1].value == 466890.0);
}

TEST_CASE("three-digit leading groups stay unambiguous in a single column") {
    const auto ds = emissions::parse_emissions_table(
        "Year, Annual CO₂ emissions from oil\n1990, 123,456\n1991, 1,234,567.5\n",
        oil_map());
    CHECK(ds.at("oil").observations[0].value == 123456.0);
    CHECK(ds.at("oil").observations[1].value == 1234567.5);
}

TEST_CASE("ambiguous unquoted separators across columns are rejected") {
    ColumnMap map = oil_map();
    map.emplace("Annual CO₂ emissions from cement", Sector::from_label("cement"));
    CHECK_THROWS_AS(emissions::parse_emissions_table(
                        "Year,Annual CO₂ emissions from oil,Annual CO₂ emissions from cement\n"
                        "1990, 22,399,392, 477,970\n",
                        map),
                    ParseError);
}

TEST_CASE("empty row set is a too-short series") {
    CHECK_THROWS_WITH_AS(
        emissions::parse_emissions_table("Year, Annual CO₂ emissions from oil\n", oil_map()),
        doctest::Contains("too short"), ValidationError);
}

TEST_CASE("rows are sorted by year before validation") {
    const auto ds = emissions::parse_emissions_table(
        "Year, Annual CO₂ emissions from oil\n1991, 10\n1990, 20\n", oil_map());
    const auto& obs = ds.at("oil").observations;
    CHECK(obs[0].year == 1990);
    CHECK(obs[0].value == 20.0);
    CHECK(obs[1].year == 1991);
}

TEST_CASE("parse failures carry locations") {
    CHECK_THROWS_WITH_AS(emissions::parse_emissions_table(
                             "Year, Annual CO₂ emissions from oil\n1990, abc\n", oil_map()),
                         doctest::Contains("row 2"), ParseError);
    CHECK_THROWS_AS(emissions::parse_emissions_table("", oil_map()), ParseError);
    CHECK_THROWS_WITH_AS(emissions::parse_emissions_table(
                             "Year, Annual CO₂ production\n1990, 5\n", oil_map()),
                         doctest::Contains("missing header"), ParseError);
    CHECK_THROWS_WITH_AS(emissions::parse_emissions_table(
                             "Epoch, Annual CO₂ emissions from oil\n1990, 5\n", oil_map()),
                         doctest::Contains("Year"), ParseError);
}

TEST_CASE("validation rejects duplicates, gaps, and negatives") {
    CHECK_THROWS_WITH_AS(
        emissions::parse_emissions_table(
            "Year, Annual CO₂ emissions from oil\n1990, 1\n1990, 2\n", oil_map()),
        doctest::Contains("duplicate year"), ValidationError);
    CHECK_THROWS_WITH_AS(
        emissions::parse_emissions_table(
            "Year, Annual CO₂ emissions from oil\n1990, 1\n1992, 2\n", oil_map()),
        doctest::Contains("year gap"), ValidationError);
    CHECK_THROWS_AS(emissions::parse_emissions_table(
                        "Year, Annual CO₂ emissions from oil\n1990, -1\n", oil_map()),
                    ValidationError);
}

TEST_CASE("split keeps the last holdout years as the test set") {
    std::vector<double> values(34);
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = 100.0 + static_cast<double>(i);
    const auto series = make_series(1990, values); // 1990..2023
    const auto [train, test] = emissions::split_train_test(series, 6);
    CHECK(train.first_year() == 1990);
    CHECK(train.last_year() == 2017);
    CHECK(test.first_year() == 2018);
    CHECK(test.last_year() == 2023);
    CHECK(train.size() + test.size() == series.size());
}

TEST_CASE("split boundary and minimal cases") {
    const auto series = make_series(2000, {1.0, 2.0});
    CHECK_THROWS_AS(emissions::split_train_test(series, 2), ArgumentError);
    CHECK_THROWS_AS(emissions::split_train_test(series, 0), ArgumentError);
    const auto [train, test] = emissions::split_train_test(series, 1);
    CHECK(train.size() == 1);
    CHECK(test.size() == 1);
    CHECK(test.observations[0].value == 2.0);
}

TEST_CASE("split concatenation reproduces the input for every valid holdout") {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 2 + rng() % 40;
        std::vector<double> values(n);
        for (auto& v : values) v = static_cast<double>(rng() % 100000);
        const auto series = make_series(1980, values);
        const std::size_t holdout = 1 + rng() % (n - 1);
        const auto [train, test] = emissions::split_train_test(series, holdout);
        auto rejoined = train.observations;
        rejoined.insert(rejoined.end(), test.observations.begin(), test.observations.end());
        CHECK(rejoined == series.observations);
    }
}

TEST_CASE("canonical csv round-trips integer tonnage exactly") {
    const auto ds = emissions::parse_emissions_table(
        "Year, Annual CO₂ emissions from oil\n1990, 22,399,392\n1991, 22,534,228\n",
        oil_map());
    const auto& series = ds.at("oil");
    const std::string canon = emissions::to_canonical_csv(series);
    CHECK(canon == "year,value\n1990,22399392\n1991,22534228\n");
    const auto reparsed = emissions::parse_canonical_csv(canon, series.sector);
    CHECK(reparsed.observations == series.observations);
}

TEST_CASE("sector labels normalize and round-trip") {
    CHECK(Sector::from_label(" Cement ").kind == emissions::SectorKind::cement);
    CHECK(Sector::from_label("Cement").label() == "cement");
    const auto other = Sector::from_label("Land Use");
    CHECK(other.kind == emissions::SectorKind::other);
    CHECK(other.label() == "land use");
    CHECK_THROWS_AS(Sector::from_label("  "), ArgumentError);
}
