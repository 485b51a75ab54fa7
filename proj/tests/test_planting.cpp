#include "canopy/planting.hpp"

#include "canopy/errors.hpp"

#include <doctest.h>

#include <boost/multiprecision/cpp_int.hpp>

#include <fstream>
#include <random>
#include <sstream>

using namespace canopy;
using planting::Allocation;
using planting::LaborPolicy;

namespace {

std::vector<species::SpeciesProfile> bundled_profiles() {
    std::ifstream in(std::string(CANOPY_DATA_DIR) + "/species.csv", std::ios::binary);
    REQUIRE(in);
    std::ostringstream buf;
    buf << in.rdbuf();
    return species::parse_species_csv(buf.str());
}

// Exact floor of a/b using the rational values of the double operands;
// truncation equals floor because both operands are non-negative here.
long long rational_floor(double a, double b) {
    using boost::multiprecision::cpp_rational;
    const cpp_rational ratio = cpp_rational(a) / cpp_rational(b);
    const auto floored =
        static_cast<boost::multiprecision::cpp_int>(numerator(ratio) / denominator(ratio));
    return static_cast<long long>(floored);
}

} // namespace

TEST_CASE("tree counts reproduce the planting table rows") {
    CHECK(planting::tree_count(90000.0, 5.0) == 18000);
    CHECK(planting::tree_count(90000.0, 6.0) == 15000);
    CHECK(planting::tree_count(90000.0, 7.0) == 12857);
    CHECK(planting::tree_count(90000.0, 3.0) == 30000);
    CHECK(planting::tree_count(0.0, 3.0) == 0);
    CHECK_THROWS_AS(planting::tree_count(10.0, 0.0), ArgumentError);
    CHECK_THROWS_AS(planting::tree_count(-1.0, 1.0), ArgumentError);
}

TEST_CASE("tree count floors exactly like rational arithmetic") {
    // Representation hazard: 0.3/0.1 in doubles is just below 3.
    CHECK(planting::tree_count(0.3, 0.1) == rational_floor(0.3, 0.1));

    std::mt19937 rng(55);
    std::uniform_int_distribution<int> numerator(0, 100000);
    std::uniform_int_distribution<int> denominator(1, 400);
    for (int trial = 0; trial < 2000; ++trial) {
        const double area = static_cast<double>(numerator(rng)) / 10.0;
        const double spacing = static_cast<double>(denominator(rng)) / 10.0;
        CHECK(planting::tree_count(area, spacing) == rational_floor(area, spacing));
    }
}

TEST_CASE("tree count is monotone in area and antitone in spacing") {
    std::mt19937 rng(56);
    std::uniform_real_distribution<double> area(0.0, 5e5);
    std::uniform_real_distribution<double> spacing(0.5, 20.0);
    for (int trial = 0; trial < 500; ++trial) {
        const double a1 = area(rng);
        const double a2 = area(rng);
        const double s1 = spacing(rng);
        const double s2 = spacing(rng);
        const auto lo_area = std::min(a1, a2);
        const auto hi_area = std::max(a1, a2);
        CHECK(planting::tree_count(lo_area, s1) <= planting::tree_count(hi_area, s1));
        const auto lo_spacing = std::min(s1, s2);
        const auto hi_spacing = std::max(s1, s2);
        CHECK(planting::tree_count(a1, lo_spacing) >= planting::tree_count(a1, hi_spacing));
    }
}

TEST_CASE("labor force matches the per-worker rate") {
    CHECK(planting::labor_force(18000) == 360);
    CHECK(planting::labor_force(15000) == 300);
    CHECK(planting::labor_force(12857) == 257);
    CHECK(planting::labor_force(30000) == 600);
    CHECK(planting::labor_force(1800000) == 36000);
    CHECK(planting::labor_force(49) == 0);
    CHECK_THROWS_AS(planting::labor_force(-1), ArgumentError);
    LaborPolicy crew;
    crew.trees_per_worker = 120;
    CHECK(planting::labor_force(1200, crew) == 10);
    crew.trees_per_worker = 0;
    CHECK_THROWS_AS(planting::labor_force(10, crew), ArgumentError);
}

TEST_CASE("exact multiples lose nothing to rounding") {
    std::mt19937 rng(57);
    std::uniform_int_distribution<int> workers(1, 400);
    const double spacings[] = {2.5, 3.0, 5.0, 6.0, 7.0};
    for (int trial = 0; trial < 300; ++trial) {
        const long long k = workers(rng);
        const double s = spacings[rng() % std::size(spacings)];
        const double area = static_cast<double>(k) * s * 50.0;
        const auto trees = planting::tree_count(area, s);
        CHECK(trees == k * 50);
        CHECK(planting::labor_force(trees) == k);
    }
}

TEST_CASE("whole-area planning reproduces the species table") {
    const auto profiles = bundled_profiles();
    const auto plan = planting::plan_for_area(0.09, profiles);
    REQUIRE(plan.entries.size() == 6);
    const long long expected_trees[] = {18000, 15000, 12857, 18000, 15000, 30000};
    const long long expected_labor[] = {360, 300, 257, 360, 300, 600};
    for (std::size_t i = 0; i < 6; ++i) {
        CHECK(plan.entries[i].tree_count == expected_trees[i]);
        CHECK(plan.entries[i].labor == expected_labor[i]);
        CHECK(plan.entries[i].area_m2 == doctest::Approx(90000.0).epsilon(1e-12));
    }
}

TEST_CASE("nine square kilometres at 5 m² spacing") {
    const auto profiles = bundled_profiles();
    const std::vector<species::SpeciesProfile> apricot{profiles[0]};
    const auto plan = planting::plan_for_area(9.0, apricot);
    REQUIRE(plan.entries.size() == 1);
    CHECK(plan.entries[0].tree_count == 1800000);
    CHECK(plan.entries[0].labor == 36000);
}

TEST_CASE("fractional allocation divides the area") {
    const auto profiles = bundled_profiles();
    const std::vector<species::SpeciesProfile> pair{profiles[0], profiles[5]};
    const auto plan =
        planting::plan_for_area(0.09, pair, Allocation::fractional({0.5, 0.5}));
    REQUIRE(plan.entries.size() == 2);
    CHECK(plan.entries[0].tree_count == 9000);  // 45000 / 5
    CHECK(plan.entries[1].tree_count == 15000); // 45000 / 3
    CHECK(plan.total_allotted_m2() == doctest::Approx(90000.0).epsilon(1e-12));

    CHECK_THROWS_AS(
        planting::plan_for_area(0.09, pair, Allocation::fractional({0.7, 0.5})),
        ArgumentError);
    CHECK_THROWS_AS(planting::plan_for_area(0.09, pair, Allocation::fractional({1.0})),
                    ArgumentError);
    CHECK_THROWS_AS(planting::plan_for_area(-0.1, pair), ArgumentError);
}

TEST_CASE("growth timeline switches on at the productive age") {
    const auto profiles = bundled_profiles();
    const auto timeline = planting::growth_timeline(profiles[0], 18000, 2025, 10);
    REQUIRE(timeline.rows.size() == 10);
    CHECK(timeline.rows[0].year == 2025);
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(timeline.rows[i].o2_kg == 0.0);
        CHECK(timeline.rows[i].stage == "seedling");
    }
    CHECK(timeline.rows[4].year == 2029);
    CHECK(timeline.rows[4].o2_kg == 0.0);
    CHECK(timeline.rows[5].year == 2030);
    CHECK(timeline.rows[5].stage == "young");
    CHECK(timeline.rows[5].o2_kg == 54000.0); // 3 kg x 18,000 trees
    CHECK(timeline.rows[5].co2_kg == 36000.0);
    CHECK(timeline.rows[5].yield_kg == 180000.0);
}

TEST_CASE("growth timeline degenerate windows") {
    const auto profiles = bundled_profiles();
    const auto zero_trees = planting::growth_timeline(profiles[0], 0, 2025, 12);
    for (const auto& row : zero_trees.rows) {
        CHECK(row.o2_kg == 0.0);
        CHECK(row.co2_kg == 0.0);
        CHECK(row.yield_kg == 0.0);
    }
    const auto short_window = planting::growth_timeline(profiles[0], 100, 2025, 4);
    for (const auto& row : short_window.rows) CHECK(row.co2_kg == 0.0);
    CHECK_THROWS_AS(planting::growth_timeline(profiles[0], 10, 2025, 0), ArgumentError);
    CHECK_THROWS_AS(planting::growth_timeline(profiles[0], -1, 2025, 5), ArgumentError);
}

TEST_CASE("growth timeline walks the stage ladder") {
    const auto profiles = bundled_profiles();
    const auto timeline = planting::growth_timeline(profiles[0], 1, 2000, 30);
    CHECK(timeline.rows[5].stage == "young");
    CHECK(timeline.rows[10].stage == "young");
    CHECK(timeline.rows[11].stage == "mature");
    CHECK(timeline.rows[20].stage == "mature");
    CHECK(timeline.rows[21].stage == "old");
    CHECK(timeline.rows[29].stage == "old");

    // Young window total for one apricot: 6 years x 3 kg.
    double young_o2 = 0.0;
    for (const auto& row : timeline.rows) {
        if (row.stage == "young") young_o2 += row.o2_kg;
    }
    CHECK(young_o2 == 18.0);
}

TEST_CASE("timelines are additive in the tree count") {
    const auto profiles = bundled_profiles();
    std::mt19937 rng(58);
    for (int trial = 0; trial < 20; ++trial) {
        const auto n1 = static_cast<std::int64_t>(rng() % 10000);
        const auto n2 = static_cast<std::int64_t>(rng() % 10000);
        const auto& profile = profiles[rng() % profiles.size()];
        const auto a = planting::growth_timeline(profile, n1, 2025, 15);
        const auto b = planting::growth_timeline(profile, n2, 2025, 15);
        const auto both = planting::growth_timeline(profile, n1 + n2, 2025, 15);
        for (std::size_t i = 0; i < both.rows.size(); ++i) {
            CHECK(both.rows[i].o2_kg ==
                  doctest::Approx(a.rows[i].o2_kg + b.rows[i].o2_kg).epsilon(1e-12));
            CHECK(both.rows[i].co2_kg ==
                  doctest::Approx(a.rows[i].co2_kg + b.rows[i].co2_kg).epsilon(1e-12));
        }
    }
}
