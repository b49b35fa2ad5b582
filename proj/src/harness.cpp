#include "nrf/harness.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "nrf/integrals.hpp"
#include "nrf/io.hpp"
#include "nrf/kernels.hpp"
#include "nrf/spectral.hpp"

namespace nrf {

const char* kVersion = "0.1.0";

const char* scenario_name(Scenario s) {
    switch (s) {
    case Scenario::FixedPoint: return "fixed-point";
    case Scenario::Conformal: return "conformal";
    case Scenario::Theorem1: return "theorem1";
    case Scenario::Theorem2: return "theorem2";
    case Scenario::SpectralSuite: return "spectral-suite";
    case Scenario::ConvolutionSuite: return "convolution-suite";
    case Scenario::ComparisonSuite: return "comparison-suite";
    }
    return "?";
}

namespace {

Scenario scenario_from_name(const std::string& s) {
    for (Scenario v : {Scenario::FixedPoint, Scenario::Conformal, Scenario::Theorem1,
                       Scenario::Theorem2, Scenario::SpectralSuite,
                       Scenario::ConvolutionSuite, Scenario::ComparisonSuite})
        if (s == scenario_name(v)) return v;
    throw std::invalid_argument("unknown scenario '" + s + "'");
}

const char* profile_name(BumpProfile p) {
    switch (p) {
    case BumpProfile::GaussianBump: return "gaussian-bump";
    case BumpProfile::PolynomialBump: return "polynomial-bump";
    case BumpProfile::RandomMultibump: return "random-multibump";
    }
    return "?";
}

BumpProfile profile_from_name(const std::string& s) {
    for (BumpProfile v : {BumpProfile::GaussianBump, BumpProfile::PolynomialBump,
                          BumpProfile::RandomMultibump})
        if (s == profile_name(v)) return v;
    throw std::invalid_argument("unknown profile '" + s + "'");
}

const char* bc_name(OuterBC bc) {
    return bc == OuterBC::PinHyperbolic ? "pin-hyperbolic" : "pin-initial";
}

OuterBC bc_from_name(const std::string& s) {
    if (s == "pin-hyperbolic") return OuterBC::PinHyperbolic;
    if (s == "pin-initial") return OuterBC::PinInitial;
    throw std::invalid_argument("unknown outer_bc '" + s + "'");
}

} // namespace

ExperimentConfig default_config(Scenario s) {
    ExperimentConfig c;
    c.scenario = s;
    switch (s) {
    case Scenario::FixedPoint:
        c.n = 4;
        c.eps = 0.0;
        c.node_count = 1000;
        c.r_max = 15.0;
        c.flow.t_end = 1.0;
        c.flow.snapshot_stride = 200;
        break;
    case Scenario::Conformal:
        c.n = 6;
        c.eps = 0.0;
        c.c0 = 1.05;
        c.node_count = 600;
        c.r_max = 15.0;
        c.flow.t_end = 0.6;
        c.flow.snapshot_stride = 20;
        c.flow.outer_bc = OuterBC::PinInitial;
        c.windows.t_lo = 0.2;
        break;
    case Scenario::Theorem1:
        c.n = 6;
        c.eps = 0.01;
        c.delta = 3.0;
        c.node_count = 1500;
        c.r_max = 15.0;
        c.flow.t_end = 2.0;
        c.flow.snapshot_stride = 400;
        c.flow.order_delta = 3.0;
        break;
    case Scenario::Theorem2:
        c = default_config(Scenario::Theorem1);
        c.scenario = Scenario::Theorem2;
        c.node_count = 3000;
        c.flow.snapshot_stride = 1000;
        break;
    case Scenario::SpectralSuite:
        c.n = 3;
        c.node_count = 4000;
        c.r_max = 20.0;
        break;
    case Scenario::ConvolutionSuite:
        c.n = 3;
        break;
    case Scenario::ComparisonSuite:
        c.n = 6;
        c.delta = 0.1;
        break;
    }
    return c;
}

std::vector<std::string> validate_config(const ExperimentConfig& cfg) {
    std::vector<std::string> errs;
    if (cfg.n < 3) errs.push_back("n: must be >= 3 (got " + std::to_string(cfg.n) + ")");
    if (cfg.eps < 0.0) errs.push_back("eps: must be >= 0");
    if (cfg.node_count < 16) errs.push_back("grid.node_count: must be >= 16");
    if (!(cfg.r_max > 0.0)) errs.push_back("grid.r_max: must be > 0");
    if (!(cfg.flow.t_end > 0.0)) errs.push_back("flow.t_end: must be > 0");
    if (!(cfg.flow.dt_safety > 0.0 && cfg.flow.dt_safety <= 1.0))
        errs.push_back("flow.dt_safety: must lie in (0, 1]");
    if (cfg.flow.snapshot_stride < 1) errs.push_back("flow.snapshot_stride: must be >= 1");
    if (cfg.scenario == Scenario::Theorem1 || cfg.scenario == Scenario::Theorem2) {
        if (!(cfg.delta > 0.0)) errs.push_back("delta: theorem scenarios need delta > 0");
        if (!(cfg.eps1 > 0.0)) errs.push_back("eps1: must be > 0");
    }
    if (cfg.scenario == Scenario::Theorem2) {
        if (cfg.n <= 5)
            errs.push_back("n: theorem2 requires n > 5 (n = " + std::to_string(cfg.n) +
                           " is excluded; n = 5 is critical, n = 4 fails outright)");
        if (!(cfg.delta > 2.0)) errs.push_back("delta: theorem2 requires delta > 2");
    }
    if (cfg.scenario == Scenario::Conformal && !(cfg.c0 > 0.0))
        errs.push_back("c0: must be > 0");
    return errs;
}

std::string config_to_json(const ExperimentConfig& c) {
    nlohmann::json j;
    j["scenario"] = scenario_name(c.scenario);
    j["n"] = c.n;
    j["eps"] = c.eps;
    j["delta"] = c.delta;
    j["eps1"] = c.eps1;
    j["c0"] = c.c0;
    j["grid"] = {{"node_count", c.node_count}, {"r_max", c.r_max}};
    j["profile"] = {{"kind", profile_name(c.profile)},
                    {"center", c.bump_center},
                    {"width", c.bump_width}};
    j["flow"] = {{"dt_safety", c.flow.dt_safety},
                 {"t_end", c.flow.t_end},
                 {"snapshot_stride", c.flow.snapshot_stride},
                 {"outer_bc", bc_name(c.flow.outer_bc)},
                 {"origin_tol", c.flow.origin_tol},
                 {"cfl_floor", c.flow.cfl_floor},
                 {"collar_fraction", c.flow.collar_fraction},
                 {"order_delta", c.flow.order_delta},
                 {"pin_width", c.flow.pin_width}};
    j["prediction"] = {{"slack", c.pred_slack}};
    j["windows"] = {{"t_lo", c.windows.t_lo},
                    {"t_hi", c.windows.t_hi},
                    {"r_lo", c.windows.r_lo},
                    {"r_hi", c.windows.r_hi}};
    j["seed"] = c.seed;
    j["output_dir"] = c.output_dir;
    return j.dump(2);
}

ExperimentConfig config_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
    }
    ExperimentConfig c = default_config(scenario_from_name(j.at("scenario")));
    if (j.contains("n")) c.n = j["n"];
    if (j.contains("eps")) c.eps = j["eps"];
    if (j.contains("delta")) c.delta = j["delta"];
    if (j.contains("eps1")) c.eps1 = j["eps1"];
    if (j.contains("c0")) c.c0 = j["c0"];
    if (j.contains("grid")) {
        if (j["grid"].contains("node_count")) c.node_count = j["grid"]["node_count"];
        if (j["grid"].contains("r_max")) c.r_max = j["grid"]["r_max"];
    }
    if (j.contains("profile")) {
        const auto& p = j["profile"];
        if (p.contains("kind")) c.profile = profile_from_name(p["kind"]);
        if (p.contains("center")) c.bump_center = p["center"];
        if (p.contains("width")) c.bump_width = p["width"];
    }
    if (j.contains("flow")) {
        const auto& f = j["flow"];
        if (f.contains("dt_safety")) c.flow.dt_safety = f["dt_safety"];
        if (f.contains("t_end")) c.flow.t_end = f["t_end"];
        if (f.contains("snapshot_stride")) c.flow.snapshot_stride = f["snapshot_stride"];
        if (f.contains("outer_bc")) c.flow.outer_bc = bc_from_name(f["outer_bc"]);
        if (f.contains("origin_tol")) c.flow.origin_tol = f["origin_tol"];
        if (f.contains("cfl_floor")) c.flow.cfl_floor = f["cfl_floor"];
        if (f.contains("collar_fraction")) c.flow.collar_fraction = f["collar_fraction"];
        if (f.contains("order_delta")) c.flow.order_delta = f["order_delta"];
        if (f.contains("pin_width")) c.flow.pin_width = f["pin_width"];
    }
    if (j.contains("prediction") && j["prediction"].contains("slack"))
        c.pred_slack = j["prediction"]["slack"];
    if (j.contains("windows")) {
        const auto& w = j["windows"];
        if (w.contains("t_lo")) c.windows.t_lo = w["t_lo"];
        if (w.contains("t_hi")) c.windows.t_hi = w["t_hi"];
        if (w.contains("r_lo")) c.windows.r_lo = w["r_lo"];
        if (w.contains("r_hi")) c.windows.r_hi = w["r_hi"];
    }
    if (j.contains("seed")) c.seed = j["seed"];
    if (j.contains("output_dir")) c.output_dir = j["output_dir"];
    return c;
}

namespace {

namespace fs = std::filesystem;

void add(RunManifest& m, const std::string& name, bool pass, double measured,
         const std::string& detail) {
    m.criteria.push_back({name, pass, measured, detail});
}

WarpedMetric initial_metric(const ExperimentConfig& cfg) {
    const auto grid = RadialGrid::with_extent(cfg.r_max, cfg.node_count);
    if (cfg.scenario == Scenario::Conformal) {
        WarpedMetric m = make_hyperbolic(cfg.n, grid);
        const double rc = std::sqrt(cfg.c0);
        for (auto& v : m.a) v *= rc;
        for (auto& v : m.b) v *= rc;
        return m;
    }
    if (cfg.eps == 0.0) return make_hyperbolic(cfg.n, grid);
    PerturbOptions opts;
    opts.profile = cfg.profile;
    opts.center = cfg.bump_center;
    opts.width = cfg.bump_width;
    opts.seed = cfg.seed;
    return perturb(cfg.n, grid, cfg.eps, cfg.delta, opts);
}

FlowTrace run_flow_and_export(const ExperimentConfig& cfg, const WarpedMetric& m0,
                              const fs::path& dir) {
    FlowConfig fc = cfg.flow;
    if (cfg.scenario == Scenario::Theorem1 || cfg.scenario == Scenario::Theorem2)
        fc.order_delta = cfg.delta;
    FlowTrace trace = run(m0, fc);
    write_metric((dir / "metric_initial.txt").string(), m0);
    write_metric((dir / "metric_final.txt").string(),
                 trace.metric_at(int(trace.snapshots.size()) - 1));
    write_trace_series((dir / "trace.tsv").string(), trace);
    {
        const auto c = curvature(m0);
        write_curvature_records((dir / "curvature_initial.jsonl").string(), m0, c,
                                hyperbolicity(m0, c, fc.order_delta, fc.collar_fraction));
    }
    return trace;
}

void scenario_fixed_point(const ExperimentConfig& cfg, const fs::path& dir, RunManifest& man) {
    const WarpedMetric m0 = initial_metric(cfg);
    const FlowTrace trace = run_flow_and_export(cfg, m0, dir);
    double sup_h = 0.0, drift = 0.0;
    for (const auto& s : trace.snapshots) sup_h = std::max(sup_h, s.sup_h);
    const auto& last = trace.snapshots.back();
    for (size_t i = 0; i < m0.a.size(); ++i) {
        drift = std::max(drift, std::abs(last.a[i] - m0.a[i]) / m0.a[i]);
        drift = std::max(drift, std::abs(last.b[i] - m0.b[i]) / m0.b[i]);
    }
    add(man, "stationarity: sup|h| <= 1e-6", trace.completed && sup_h <= 1e-6, sup_h,
        "sup over trace of sup|h|");
    add(man, "stationarity: metric drift <= 1e-5", drift <= 1e-5, drift,
        "relative sup drift of (a, b)");
}

void scenario_conformal(const ExperimentConfig& cfg, const fs::path& dir, RunManifest& man) {
    const WarpedMetric m0 = initial_metric(cfg);
    const FlowTrace trace = run_flow_and_export(cfg, m0, dir);
    const int mid = cfg.node_count / 2;
    const double rate = 2.0 * double(cfg.n - 1);

    for (double t_probe : {0.1, 0.5}) {
        if (t_probe > cfg.flow.t_end) continue;
        int k = 0;
        for (size_t j = 0; j < trace.snapshots.size(); ++j)
            if (std::abs(trace.snapshots[j].t - t_probe) <
                std::abs(trace.snapshots[size_t(k)].t - t_probe))
                k = int(j);
        const double c_num = trace.snapshots[size_t(k)].a[size_t(mid)] *
                             trace.snapshots[size_t(k)].a[size_t(mid)];
        const double c_exact =
            1.0 + (cfg.c0 - 1.0) * std::exp(-rate * trace.snapshots[size_t(k)].t);
        const double rel = std::abs(c_num - c_exact) / c_exact;
        add(man, "conformal factor at t=" + std::to_string(t_probe), rel <= 1e-5, rel,
            "relative error vs 1 + (c0-1) e^{-2(n-1)t}");
    }

    const DecayPrediction pred = DecayPrediction::for_dimension(cfg.n, cfg.delta, cfg.pred_slack);
    FitWindows w = cfg.windows;
    w.t_hi = cfg.flow.t_end;
    w.r_lo = 1.0;
    w.r_hi = cfg.r_max / 2.0;
    const DecayReport rep = fit_decay(trace, pred, w);
    const double rel_rate = std::abs(rep.temporal_rate - rate) / rate;
    add(man, "sup|h| temporal rate = 2(n-1) within 5%", rel_rate <= 0.05, rep.temporal_rate,
        "fitted on the interior sup");
}

void scenario_theorems(const ExperimentConfig& cfg, const fs::path& dir, RunManifest& man) {
    const WarpedMetric m0 = initial_metric(cfg);
    const FlowTrace trace = run_flow_and_export(cfg, m0, dir);
    add(man, "flow completed", trace.completed, trace.completed ? 1.0 : 0.0, "");

    double eps_curv_max = 0.0;
    for (const auto& s : trace.snapshots) eps_curv_max = std::max(eps_curv_max, s.eps.eps_curv);
    add(man, "eps-hyperbolicity preserved (eps_curv <= eps1)", eps_curv_max <= cfg.eps1,
        eps_curv_max, "sup over trace");

    const double h0 = trace.snapshots.front().sup_h_interior;
    const double h1 = trace.snapshots.back().sup_h_interior;
    add(man, "sup|h| contracts", h1 < h0, h1 / std::max(h0, 1e-300), "end/start ratio");

    const DecayPrediction pred = DecayPrediction::for_dimension(cfg.n, cfg.delta, cfg.pred_slack);
    const DecayReport rep = fit_decay(trace, pred, cfg.windows);
    add(man, "temporal decay rate >= 3", rep.temporal_rate >= 3.0, rep.temporal_rate, "");

    if (cfg.scenario == Scenario::Theorem2) {
        add(man, "spatial order > 2", rep.spatial_order > 2.0, rep.spatial_order,
            "fitted |K+1| order on the spatial window");
        add(man, "K <= 0 at t_end", rep.k_max <= 1e-3, rep.k_max, "max sectional curvature");
        add(man, "Ric >= -(n-1)g at t_end", rep.h_min >= -1e-3, rep.h_min,
            "min h eigenvalue");
        add(man, "theorem2 verdict (empirical)", rep.theorem2_verdict,
            rep.theorem2_verdict ? 1.0 : 0.0, "hypotheses + measured conclusions, not a proof");
    }

    std::ofstream rep_out(dir / "decay_report.json");
    nlohmann::json jr{{"temporal_rate", rep.temporal_rate},
                      {"temporal_rms", rep.temporal_rms},
                      {"spatial_order", rep.spatial_order},
                      {"spatial_rms", rep.spatial_rms},
                      {"accumulation", rep.accumulation},
                      {"k_max", rep.k_max},
                      {"h_min", rep.h_min},
                      {"theorem2_verdict", rep.theorem2_verdict},
                      {"low_confidence", rep.low_confidence}};
    rep_out << jr.dump(2) << "\n";
}

void scenario_spectral(const ExperimentConfig& cfg, const fs::path& dir, RunManifest& man) {
    const auto grid = RadialGrid::with_extent(cfg.r_max, cfg.node_count);
    const auto hyp3 = make_hyperbolic(3, grid);
    const double l0 = function_bottom(hyp3).value;
    const double expected = 1.0 + M_PI * M_PI / (cfg.r_max * cfg.r_max);
    add(man, "n=3 bottom = 1 + (pi/R)^2", std::abs(l0 - expected) <= 1e-4, l0,
        "expected " + format_double(expected));

    const auto grid7 = RadialGrid::with_extent(30.0, 3000);
    const double l7 = function_bottom(make_hyperbolic(7, grid7)).value;
    add(man, "n=7 bottom within 1% of 9", std::abs(l7 - 9.0) <= 0.09, l7, "r_max=30");

    // slack curve: bound deficit vs realized eps_curv
    std::ofstream slack(dir / "spectral_slack.tsv");
    slack << "# eps_knob eps_curv bottom deficit\n";
    for (double ek : {0.0, 0.005, 0.01, 0.02}) {
        WarpedMetric m = ek == 0.0 ? make_hyperbolic(6, grid)
                                   : perturb(6, grid, ek, 3.0, PerturbOptions{});
        const auto rep = hyperbolicity(m, 3.0);
        const double bottom = function_bottom(m).value;
        slack << format_double(ek) << ' ' << format_double(rep.eps_curv) << ' '
              << format_double(bottom) << ' ' << format_double(6.25 - bottom) << "\n";
    }
    add(man, "slack curve written", true, 0.0, "spectral_slack.tsv");
}

void scenario_convolution(const ExperimentConfig& cfg, const fs::path& dir, RunManifest& man) {
    ConvolutionQuery q;
    q.n = 3;
    q.a_exp = 3.0;
    q.b_exp = 1.0;
    q.D = 0.0;
    const auto r = convolution_integral(q);
    add(man, "n=3 a=3 b=1 D=0 equals pi/6", std::abs(r.value - M_PI / 6.0) <= 1e-3, r.value,
        "expected " + format_double(M_PI / 6.0));

    std::vector<double> ds;
    for (int i = 0; i <= 10; ++i) ds.push_back(double(i));
    const auto curve = convolution_ratio_curve(3, 3.0, 1.0, ds);
    write_ratio_table((dir / "convolution_ratio.tsv").string(), curve);
    add(man, "tail log-slope within 0.02", std::abs(curve.tail_slope) <= 0.02,
        curve.tail_slope, "");

    ConvolutionQuery qb = q;
    qb.a_exp = 1.0;
    qb.b_exp = 1.0;
    add(man, "a+b = n-1 flagged divergent", convolution_integral(qb).divergent, 0.0, "");
    (void)cfg;
}

void scenario_comparison(const ExperimentConfig& cfg, const fs::path& dir, RunManifest& man) {
    const double e0 = find_epsilon0(cfg.n, cfg.delta);
    add(man, "epsilon0 >= 1e-3", e0 >= 1e-3, e0,
        "largest eps passing the margin predicate");
    double worst = 1e300;
    for (int i = 0; i < 512; ++i) {
        const double r = std::exp(std::log(200.0) * double(i) / 511.0);
        worst = std::min(worst, comparison_margin(cfg.n, 0.0, std::max(1.0, r)).margin);
    }
    const double target = double(cfg.n - 3) * double(cfg.n - 3) / 4.0;
    add(man, "M(n,0,r) >= (n-3)^2/4 on the scan", worst >= target - 1e-12, worst,
        "target " + format_double(target));

    std::ofstream sweep(dir / "comparison_margin.tsv");
    sweep << "# r margin(eps=0) margin(eps=eps0)\n";
    for (int i = 0; i < 64; ++i) {
        const double r = std::max(1.0, std::exp(std::log(200.0) * double(i) / 63.0));
        sweep << format_double(r) << ' '
              << format_double(comparison_margin(cfg.n, 0.0, r).margin) << ' '
              << format_double(comparison_margin(cfg.n, e0, r).margin) << "\n";
    }
}

} // namespace

RunManifest run_scenario(const ExperimentConfig& cfg) {
    const auto errs = validate_config(cfg);
    if (!errs.empty()) {
        std::string msg = "config rejected:";
        for (const auto& e : errs) msg += "\n  " + e;
        throw std::invalid_argument(msg);
    }

    const auto t0 = std::chrono::steady_clock::now();
    RunManifest man;
    man.scenario = scenario_name(cfg.scenario);
    man.version = kVersion;
    man.backend = kernels::backend_name(kernels::active_backend());
    man.config_json = config_to_json(cfg);

    const fs::path dir(cfg.output_dir);
    fs::create_directories(dir);

    switch (cfg.scenario) {
    case Scenario::FixedPoint: scenario_fixed_point(cfg, dir, man); break;
    case Scenario::Conformal: scenario_conformal(cfg, dir, man); break;
    case Scenario::Theorem1:
    case Scenario::Theorem2: scenario_theorems(cfg, dir, man); break;
    case Scenario::SpectralSuite: scenario_spectral(cfg, dir, man); break;
    case Scenario::ConvolutionSuite: scenario_convolution(cfg, dir, man); break;
    case Scenario::ComparisonSuite: scenario_comparison(cfg, dir, man); break;
    }

    man.pass = true;
    for (const auto& c : man.criteria) man.pass = man.pass && c.pass;
    man.wall_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
    write_manifest((dir / "manifest.json").string(), man);
    return man;
}

void write_manifest(const std::string& path, const RunManifest& m) {
    nlohmann::json j;
    j["scenario"] = m.scenario;
    j["version"] = m.version;
    j["backend"] = m.backend;
    j["wall_ms"] = m.wall_ms;
    j["pass"] = m.pass;
    j["config"] = nlohmann::json::parse(m.config_json);
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : m.criteria)
        arr.push_back({{"name", c.name},
                       {"pass", c.pass},
                       {"measured", c.measured},
                       {"detail", c.detail}});
    j["criteria"] = arr;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_manifest: cannot open " + path);
    out << j.dump(2) << "\n";
}

} // namespace nrf
