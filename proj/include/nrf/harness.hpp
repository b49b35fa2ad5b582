#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "nrf/analysis.hpp"
#include "nrf/flow.hpp"

namespace nrf {

enum class Scenario {
    FixedPoint,
    Conformal,
    Theorem1,
    Theorem2,
    SpectralSuite,
    ConvolutionSuite,
    ComparisonSuite,
};

const char* scenario_name(Scenario s);

struct ExperimentConfig {
    Scenario scenario = Scenario::FixedPoint;
    int n = 4;
    double eps = 0.0;
    double delta = 1.0;
    double eps1 = 0.1;  // hyperbolicity budget the theorem scenarios assert
    double c0 = 1.05;   // conformal factor (conformal scenario)
    int node_count = 600;
    double r_max = 12.0;
    BumpProfile profile = BumpProfile::GaussianBump;
    double bump_center = 2.0;
    double bump_width = 0.8;
    FlowConfig flow;
    double pred_slack = 0.5;
    FitWindows windows;
    std::uint64_t seed = 1;
    std::string output_dir = "nrflow-out";
};

// Defaults tuned per scenario (grid extents, horizons, boundary condition).
ExperimentConfig default_config(Scenario s);

struct CriterionResult {
    std::string name;
    bool pass = false;
    double measured = 0.0;
    std::string detail;
};

struct RunManifest {
    std::string scenario;
    std::string version;
    std::string backend;
    double wall_ms = 0.0;
    bool pass = false;
    std::vector<CriterionResult> criteria;
    std::string config_json; // canonical serialization for bit-exact replay
};

// Field-level validation messages; empty means the config is runnable.
// Scenario gates mirror the theorem hypotheses: theorem1 needs n >= 3 and
// delta > 0, theorem2 needs n > 5 and delta > 2.
std::vector<std::string> validate_config(const ExperimentConfig& cfg);

std::string config_to_json(const ExperimentConfig& cfg); // canonical (sorted keys)
ExperimentConfig config_from_json(const std::string& text);

// Orchestrates geometry -> flow -> analysis (or the suite modules), writes
// artifacts under cfg.output_dir, and returns the manifest. Throws
// std::invalid_argument when validate_config() is non-empty.
RunManifest run_scenario(const ExperimentConfig& cfg);

void write_manifest(const std::string& path, const RunManifest& m);

extern const char* kVersion;

} // namespace nrf
