#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "nrf/harness.hpp"
#include "nrf/io.hpp"
#include "nrf/kernels.hpp"

using namespace nrf;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir(const char* tag) : path(fs::temp_directory_path() / tag) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

} // namespace

TEST_CASE("config validation mirrors the theorem hypotheses") {
    ExperimentConfig c = default_config(Scenario::Theorem2);
    CHECK(validate_config(c).empty());

    SUBCASE("n = 2 rejected everywhere") {
        c.n = 2;
        const auto errs = validate_config(c);
        REQUIRE(!errs.empty());
        CHECK(errs.front().find("n:") == 0);
    }
    SUBCASE("theorem2 rejects n = 4, 5 and delta <= 2") {
        c.n = 5;
        CHECK(!validate_config(c).empty());
        c.n = 6;
        c.delta = 1.5;
        CHECK(!validate_config(c).empty());
        c.delta = 2.5;
        CHECK(validate_config(c).empty());
    }
    SUBCASE("theorem1 allows n = 4 but needs delta > 0") {
        ExperimentConfig t1 = default_config(Scenario::Theorem1);
        t1.n = 4;
        CHECK(validate_config(t1).empty());
        t1.delta = 0.0;
        CHECK(!validate_config(t1).empty());
    }
    SUBCASE("run_scenario refuses an invalid config") {
        c.n = 2;
        CHECK_THROWS_AS(run_scenario(c), std::invalid_argument);
    }
}

TEST_CASE("config JSON round-trips to identical bytes") {
    ExperimentConfig c = default_config(Scenario::Theorem1);
    c.eps = 0.0125;
    c.seed = 99;
    const std::string j1 = config_to_json(c);
    const ExperimentConfig c2 = config_from_json(j1);
    const std::string j2 = config_to_json(c2);
    CHECK(j1 == j2);
    CHECK(config_from_json(j2).seed == 99);
    CHECK_THROWS_AS(config_from_json("{\"scenario\": \"nope\"}"), std::invalid_argument);
    CHECK_THROWS_AS(config_from_json("not json"), std::invalid_argument);
}

TEST_CASE("fixed-point scenario runs and passes on a small grid") {
    TempDir dir("nrf-harness-fp");
    ExperimentConfig c = default_config(Scenario::FixedPoint);
    c.node_count = 600;
    c.r_max = 8.0;
    c.flow.t_end = 0.2;
    c.flow.snapshot_stride = 100;
    c.output_dir = (dir.path / "run").string();
    const auto man = run_scenario(c);
    CHECK(man.pass);
    CHECK(fs::exists(dir.path / "run" / "manifest.json"));
    CHECK(fs::exists(dir.path / "run" / "trace.tsv"));
    CHECK(fs::exists(dir.path / "run" / "metric_final.txt"));
}

TEST_CASE("determinism: same config and seed give identical criteria") {
    TempDir dir("nrf-harness-det");
    ExperimentConfig c = default_config(Scenario::Theorem1);
    c.node_count = 300;
    c.r_max = 8.0;
    c.flow.t_end = 0.3;
    c.flow.snapshot_stride = 60;
    c.profile = BumpProfile::RandomMultibump;
    c.seed = 1234;
    c.output_dir = (dir.path / "a").string();
    const auto m1 = run_scenario(c);
    c.output_dir = (dir.path / "b").string();
    const auto m2 = run_scenario(c);
    REQUIRE(m1.criteria.size() == m2.criteria.size());
    for (size_t i = 0; i < m1.criteria.size(); ++i) {
        CHECK(m1.criteria[i].pass == m2.criteria[i].pass);
        CHECK(m1.criteria[i].measured == m2.criteria[i].measured);
    }
}

TEST_CASE("comparison suite passes its gates") {
    TempDir dir("nrf-harness-cmp");
    ExperimentConfig c = default_config(Scenario::ComparisonSuite);
    c.output_dir = (dir.path / "run").string();
    const auto man = run_scenario(c);
    CHECK(man.pass);
}

TEST_CASE("metric files round-trip") {
    TempDir dir("nrf-io");
    const auto grid = RadialGrid::with_extent(6.0, 300);
    const auto m = perturb(5, grid, 0.02, 2.0, PerturbOptions{});
    const auto path = (dir.path / "m.txt").string();
    write_metric(path, m);
    const auto back = read_metric(path);
    CHECK(back.dim == m.dim);
    CHECK(back.grid.node_count == m.grid.node_count);
    CHECK(back.grid.dr == m.grid.dr);
    CHECK(kernels::max_abs_diff(back.a.data(), m.a.data(), m.a.size()) == 0.0);
    CHECK(kernels::max_abs_diff(back.b.data(), m.b.data(), m.b.size()) == 0.0);
    CHECK_THROWS(read_metric((dir.path / "missing.txt").string()));
}

TEST_CASE("trace and curvature exports are written") {
    TempDir dir("nrf-io2");
    const auto grid = RadialGrid::with_extent(6.0, 300);
    const auto m = make_hyperbolic(4, grid);
    FlowConfig cfg;
    cfg.t_end = 0.05;
    cfg.snapshot_stride = 50;
    const auto tr = run(m, cfg);
    write_trace_series((dir.path / "t.tsv").string(), tr);
    const auto c = curvature(m);
    write_curvature_records((dir.path / "c.jsonl").string(), m, c, hyperbolicity(m, c, 1.0));
    std::ifstream in(dir.path / "c.jsonl");
    int lines = 0;
    std::string line, last;
    while (std::getline(in, line)) {
        ++lines;
        last = line;
    }
    CHECK(lines == grid.node_count + 1);
    CHECK(last.find("summary") != std::string::npos);
}
