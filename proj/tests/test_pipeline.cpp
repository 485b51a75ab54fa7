#include "canopy/pipeline.hpp"

#include "canopy/errors.hpp"

#include <doctest.h>

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace canopy;
namespace fs = std::filesystem;

namespace {

fs::path data_dir() { return fs::path(CANOPY_DATA_DIR); }

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE_MESSAGE(in, path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("canopy_test_" + tag);
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

pipeline::ScenarioConfig bundled_config(const fs::path& out) {
    auto cfg = pipeline::ScenarioConfig::load(data_dir() / "scenario.json");
    cfg.output_dir = out;
    return cfg;
}

} // namespace

TEST_CASE("report writes a coherent summary over the bundled fixtures") {
    TempDir tmp("report");
    const auto artifacts = pipeline::run_report(bundled_config(tmp.path));
    CHECK(!artifacts.written.empty());

    const auto summary = nlohmann::json::parse(slurp(tmp.path / "summary.json"));

    // Table layout: six species with the fixed tree and labor counts.
    const auto& rows = summary["plan"]["rows"];
    REQUIRE(rows.size() == 6);
    const long long trees[] = {18000, 15000, 12857, 18000, 15000, 30000};
    const long long labor[] = {360, 300, 257, 360, 300, 600};
    const char* names[] = {"Ərik (Apricot)",        "Şaftalı (Peach)",
                           "Armud Ağacı (Pear)",    "Gavalı Ağacı (Plum)",
                           "Alma Ağacı (Apple)",    "Qarağat (Blackcurrant)"};
    for (std::size_t i = 0; i < 6; ++i) {
        CHECK(rows[i]["tree_type"] == names[i]);
        CHECK(rows[i]["tree_count"] == trees[i]);
        CHECK(rows[i]["labor_force"] == labor[i]);
    }

    CHECK(summary["detection"]["total_area_km2"].get<double>() ==
          doctest::Approx(0.09).epsilon(1e-9));
    CHECK(summary["detection"]["images"] == 3);
    CHECK(summary["recommendation"]["species"].size() == 6);
    CHECK(summary["recommendation"]["chunk_id"] == "meadow_1600");
    CHECK(summary["offset"]["first_sequestration_year"] == 2030);
    CHECK(summary["offset"]["crossover_year"].is_null()); // partial offset only
    CHECK(summary["offset"]["rows"].size() == 10);
    CHECK(summary["forecast"]["rows"][0]["year"] == 2024);
    CHECK(summary["backtests"].contains("cement"));
    CHECK(summary["backtests"]["cement"].contains("error_rate"));
    CHECK(summary["backtests"].size() == 5);

    // Row identity survives the 6-digit rounding.
    for (const auto& row : summary["offset"]["rows"]) {
        const double forecast_t = row["forecast_t"].get<double>();
        const double net = row["net_t"].get<double>();
        const double seq = row["co2_sequestered_t"].get<double>();
        CHECK(net + seq == doctest::Approx(forecast_t).epsilon(1e-5));
    }
}

TEST_CASE("two report runs are byte-identical") {
    TempDir first("det_a");
    TempDir second("det_b");
    pipeline::run_report(bundled_config(first.path));
    pipeline::run_report(bundled_config(second.path));
    CHECK(slurp(first.path / "summary.json") == slurp(second.path / "summary.json"));
    CHECK(slurp(first.path / "plan.csv") == slurp(second.path / "plan.csv"));
    CHECK(slurp(first.path / "projection.csv") == slurp(second.path / "projection.csv"));
}

TEST_CASE("individual stages compose to the report's artifacts") {
    TempDir whole("whole");
    TempDir stages("stages");
    pipeline::run_report(bundled_config(whole.path));

    for (const auto name : {"ingest", "backtest", "forecast", "detect-area", "recommend",
                            "plan", "offset"}) {
        pipeline::run_stage(name, bundled_config(stages.path));
    }
    for (const auto file :
         {"sector_cement.csv", "backtest_cement.json", "backtest_flaring.csv",
          "forecast_cement.csv", "areas.csv", "recommendation.json", "plan.csv",
          "timeline_apricot.csv", "projection.csv", "offset.json"}) {
        CHECK_MESSAGE(slurp(whole.path / file) == slurp(stages.path / file), file);
    }
}

TEST_CASE("config loading rejects unknown and malformed fields") {
    TempDir tmp("cfg");
    const auto write = [&](const std::string& name, const std::string& body) {
        std::ofstream out(tmp.path / name);
        out << body;
        return tmp.path / name;
    };
    CHECK_THROWS_AS(pipeline::ScenarioConfig::load(tmp.path / "absent.json"), ConfigError);
    CHECK_THROWS_AS(pipeline::ScenarioConfig::load(write("bad.json", "{nope")), ConfigError);
    CHECK_THROWS_WITH_AS(pipeline::ScenarioConfig::load(
                             write("unknown.json", R"({"emission_path": "x"})")),
                         doctest::Contains("emission_path"), ConfigError);
    CHECK_THROWS_WITH_AS(
        pipeline::ScenarioConfig::load(write("badkey.json", R"({"key": {"humidity_mm": 5}})")),
        doctest::Contains("key"), ConfigError);
    CHECK_THROWS_AS(pipeline::ScenarioConfig::load(
                        write("badalloc.json", R"({"allocation": "half"})")),
                    ConfigError);
}

TEST_CASE("stages name the missing config field") {
    TempDir tmp("missing");
    pipeline::ScenarioConfig cfg; // nothing set
    cfg.output_dir = tmp.path;
    CHECK_THROWS_WITH_AS(pipeline::run_ingest(cfg), doctest::Contains("emissions_path"),
                         ConfigError);
    CHECK_THROWS_WITH_AS(pipeline::run_detect_area(cfg), doctest::Contains("manifest_path"),
                         ConfigError);
    CHECK_THROWS_WITH_AS(pipeline::run_recommend(cfg), doctest::Contains("kb_dir"),
                         ConfigError);

    auto bundled = bundled_config(tmp.path);
    bundled.emissions_path = tmp.path / "nowhere.csv";
    CHECK_THROWS_WITH_AS(pipeline::run_ingest(bundled), doctest::Contains("does not exist"),
                         ConfigError);
}

TEST_CASE("plant_year sanity bound is enforced") {
    TempDir tmp("plant");
    auto cfg = bundled_config(tmp.path);
    cfg.plant_year = 1900; // forecast starts 2024
    CHECK_THROWS_WITH_AS(pipeline::run_offset(cfg), doctest::Contains("plant_year"),
                         ConfigError);
}

TEST_CASE("failing stages remove their partial artifacts") {
    TempDir tmp("partial");
    TempDir out("partial_out");
    // Orphan label file: parse succeeds, region assembly fails after areas
    // would have begun writing in a naive implementation.
    fs::create_directories(tmp.path / "labels");
    std::ofstream(tmp.path / "labels/manifest.csv")
        << "image_id,width_px,height_px,px_per_km\nscene_001,1400,1400,1400\n";
    std::ofstream(tmp.path / "labels/scene_001.txt") << "0 0.5 0.5 0.2 0.2\n";
    std::ofstream(tmp.path / "labels/orphan.txt") << "0 0.5 0.5 0.2 0.2\n";

    auto cfg = bundled_config(out.path);
    cfg.manifest_path = tmp.path / "labels/manifest.csv";
    cfg.labels_dir = tmp.path / "labels";
    CHECK_THROWS_AS(pipeline::run_detect_area(cfg), ArgumentError);
    CHECK(!fs::exists(out.path / "areas.csv"));

    // A failing report leaves no artifacts at all.
    CHECK_THROWS_AS(pipeline::run_report(cfg), ArgumentError);
    CHECK(fs::is_empty(out.path));
}

TEST_CASE("fractional scenario plans and offsets consistently") {
    TempDir tmp("fractional");
    auto cfg = bundled_config(tmp.path);
    cfg.allocation_mode = planting::Allocation::Mode::fractional;
    cfg.allocation_fractions = {{"Ərik", 0.5}, {"Qarağat", 0.25}};
    cfg.offset_species = {"Ərik (Apricot)", "Qarağat"};
    pipeline::run_report(cfg);
    const auto summary = nlohmann::json::parse(slurp(tmp.path / "summary.json"));
    const auto& rows = summary["plan"]["rows"];
    CHECK(rows[0]["tree_count"] == 9000);  // 45,000 m² / 5
    CHECK(rows[5]["tree_count"] == 7500);  // 22,500 m² / 3
    CHECK(rows[1]["tree_count"] == 0);
    CHECK(summary["offset"]["species"].size() == 2);

    cfg.allocation_fractions = {{"Not A Species", 1.0}};
    CHECK_THROWS_AS(pipeline::run_plan(cfg), ConfigError);
}

TEST_CASE("unknown subcommands are rejected") {
    pipeline::ScenarioConfig cfg;
    CHECK_THROWS_AS(pipeline::run_stage("transmogrify", cfg), ArgumentError);
}

namespace {

int run_cli(const std::string& args, const fs::path& stderr_file) {
    const std::string cmd = std::string("\"") + CANOPY_PLAN_BIN + "\" " + args +
                            " > /dev/null 2> \"" + stderr_file.string() + "\"";
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

} // namespace

TEST_CASE("cli exits 2 with an error json naming the config problem") {
    TempDir tmp("cli_err");
    const auto errfile = tmp.path / "stderr.txt";
    CHECK(run_cli("report --config " + (tmp.path / "missing.json").string(), errfile) == 2);
    auto err = nlohmann::json::parse(slurp(errfile));
    CHECK(err["error"]["type"] == "config");

    std::ofstream(tmp.path / "bad.json") << R"({"emissions_path": 7})";
    CHECK(run_cli("ingest --config " + (tmp.path / "bad.json").string(), errfile) == 2);
    err = nlohmann::json::parse(slurp(errfile));
    CHECK(err["error"]["message"].get<std::string>().find("emissions_path") !=
          std::string::npos);

    CHECK(run_cli("report", errfile) == 2); // missing --config entirely
    err = nlohmann::json::parse(slurp(errfile));
    CHECK(err["error"]["type"] == "usage");
}

TEST_CASE("cli exits 1 on module errors") {
    TempDir tmp("cli_mod");
    // Structurally valid config whose emissions table has a year gap.
    std::ofstream(tmp.path / "gap.csv") << "Year,Oil\n1990,5\n1992,6\n";
    std::ofstream(tmp.path / "cfg.json") << R"({
        "emissions_path": "gap.csv",
        "column_map": {"Oil": "oil"}
    })";
    const auto errfile = tmp.path / "stderr.txt";
    CHECK(run_cli("ingest --config " + (tmp.path / "cfg.json").string(), errfile) == 1);
    const auto err = nlohmann::json::parse(slurp(errfile));
    CHECK(err["error"]["type"] == "module");
    CHECK(err["error"]["message"].get<std::string>().find("year gap") != std::string::npos);
}

TEST_CASE("cli backtest emits the metric report schema") {
    TempDir tmp("cli_bt");
    const auto config = data_dir() / "scenario.json";
    const int rc = run_cli("backtest --config " + config.string() + " --sector cement" +
                               " --holdout 6 --output-dir " + tmp.path.string(),
                           tmp.path / "stderr.txt");
    CHECK(rc == 0);
    const auto report = nlohmann::json::parse(slurp(tmp.path / "backtest_cement.json"));
    CHECK(report.contains("error_rate"));
    CHECK(report.contains("error_stddev_abs"));
    CHECK(report.contains("error_stddev_relative"));
    CHECK(report.contains("params"));
    CHECK(report.contains("sse"));
    CHECK(report["error_rate"].is_number());
}

TEST_CASE("cli overrides change the fit") {
    TempDir coarse("cli_coarse");
    TempDir fine("cli_fine");
    const auto config = data_dir() / "scenario.json";
    CHECK(run_cli("forecast --config " + config.string() + " --grid-steps 3 --output-dir " +
                      coarse.path.string(),
                  coarse.path / "stderr.txt") == 0);
    CHECK(run_cli("forecast --config " + config.string() + " --horizon 4 --output-dir " +
                      fine.path.string(),
                  fine.path / "stderr.txt") == 0);
    const auto a = nlohmann::json::parse(slurp(coarse.path / "forecast_cement.json"));
    const auto b = nlohmann::json::parse(slurp(fine.path / "forecast_cement.json"));
    CHECK(a["horizon"] == 10);
    CHECK(b["horizon"] == 4);
    CHECK(b["forecast"].size() == 4);
}
