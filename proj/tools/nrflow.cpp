// nrflow: normalized Ricci flow laboratory for rotationally symmetric
// perturbations of hyperbolic space.
//
// Subcommands: flow-run, spectrum, convolution, comparison, scenario.
// Exit code 0 iff every asserted criterion passes.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "nrf/analysis.hpp"
#include "nrf/harness.hpp"
#include "nrf/integrals.hpp"
#include "nrf/io.hpp"
#include "nrf/kernels.hpp"
#include "nrf/spectral.hpp"

using namespace nrf;

namespace {

void print_manifest(const RunManifest& man) {
    std::printf("scenario %s (backend %s, %.0f ms)\n", man.scenario.c_str(),
                man.backend.c_str(), man.wall_ms);
    for (const auto& c : man.criteria)
        std::printf("  [%s] %-48s measured=%.6g %s\n", c.pass ? "PASS" : "FAIL",
                    c.name.c_str(), c.measured, c.detail.c_str());
    std::printf("%s\n", man.pass ? "PASS" : "FAIL");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"normalized Ricci flow laboratory on H^n (warped-product reduction)"};
    app.require_subcommand(1);

    bool force_scalar = false;
    app.add_flag("--scalar", force_scalar, "force the scalar kernel backend");

    // ---- scenario ----------------------------------------------------------
    auto* sc = app.add_subcommand("scenario", "run a preset experiment from a JSON config");
    std::string config_path, out_override, preset;
    sc->add_option("--config", config_path, "JSON config file");
    sc->add_option("--preset", preset,
                   "built-in preset (fixed-point, conformal, theorem1, theorem2, "
                   "spectral-suite, convolution-suite, comparison-suite)");
    sc->add_option("--out", out_override, "output directory override");
    bool dump_config = false;
    sc->add_flag("--dump-config", dump_config, "print the effective config and exit");

    // ---- flow-run ----------------------------------------------------------
    auto* fr = app.add_subcommand("flow-run", "integrate the flow from a perturbed metric");
    int n = 6, nodes = 1000, stride = 100;
    double eps = 0.01, delta = 3.0, rmax = 15.0, t_end = 1.0, dt_safety = 0.5;
    std::string outer_bc = "pin-hyperbolic", out_dir = "nrflow-out", metric_in;
    fr->add_option("--n", n, "dimension (>= 3)");
    fr->add_option("--eps", eps, "perturbation amplitude knob (0 = hyperbolic)");
    fr->add_option("--delta", delta, "decay order of the perturbation");
    fr->add_option("--rmax", rmax, "domain radius");
    fr->add_option("--nodes", nodes, "grid nodes");
    fr->add_option("--t-end", t_end, "flow horizon");
    fr->add_option("--dt-safety", dt_safety, "fraction of the parabolic step limit");
    fr->add_option("--stride", stride, "snapshot stride");
    fr->add_option("--outer-bc", outer_bc, "pin-hyperbolic | pin-initial");
    fr->add_option("--metric", metric_in, "start from a metric file instead");
    fr->add_option("--out", out_dir, "output directory");

    // ---- spectrum ----------------------------------------------------------
    auto* sp = app.add_subcommand("spectrum", "bottom of the radial Dirichlet spectrum");
    int sp_n = 3, sp_nodes = 4000;
    double sp_rmax = 20.0, sp_eps = 0.0, sp_delta = 3.0;
    sp->add_option("--n", sp_n, "dimension");
    sp->add_option("--rmax", sp_rmax, "domain radius");
    sp->add_option("--nodes", sp_nodes, "grid nodes");
    sp->add_option("--eps", sp_eps, "perturbation knob");
    sp->add_option("--delta", sp_delta, "perturbation order");

    // ---- convolution -------------------------------------------------------
    auto* cv = app.add_subcommand("convolution", "exponential-kernel convolution sweep");
    int cv_n = 3, cv_steps = 10;
    double cv_a = 3.0, cv_b = 1.0, cv_dmax = 10.0;
    std::string cv_out;
    cv->add_option("--n", cv_n, "dimension");
    cv->add_option("--a", cv_a, "first exponent");
    cv->add_option("--b", cv_b, "second exponent");
    cv->add_option("--dmax", cv_dmax, "largest base-point separation");
    cv->add_option("--steps", cv_steps, "sweep steps");
    cv->add_option("--out", cv_out, "ratio table path");

    // ---- comparison --------------------------------------------------------
    auto* cm = app.add_subcommand("comparison", "cosh/sinh comparison margin and epsilon0");
    int cm_n = 6;
    double cm_delta = 0.1, cm_rscan = 200.0;
    cm->add_option("--n", cm_n, "dimension");
    cm->add_option("--delta", cm_delta, "margin budget");
    cm->add_option("--rscan", cm_rscan, "scan upper bound");

    CLI11_PARSE(app, argc, argv);
    if (force_scalar) kernels::set_backend(kernels::Backend::Scalar);

    try {
        if (sc->parsed()) {
            ExperimentConfig cfg;
            if (!config_path.empty()) {
                std::ifstream in(config_path);
                if (!in) {
                    std::cerr << "cannot open " << config_path << "\n";
                    return 2;
                }
                std::stringstream ss;
                ss << in.rdbuf();
                cfg = config_from_json(ss.str());
            } else if (!preset.empty()) {
                ExperimentConfig probe;
                probe = config_from_json("{\"scenario\": \"" + preset + "\"}");
                cfg = probe;
            } else {
                std::cerr << "scenario: need --config or --preset\n";
                return 2;
            }
            if (!out_override.empty()) cfg.output_dir = out_override;
            if (dump_config) {
                std::cout << config_to_json(cfg) << "\n";
                return 0;
            }
            const auto errs = validate_config(cfg);
            if (!errs.empty()) {
                std::cerr << "config rejected:\n";
                for (const auto& e : errs) std::cerr << "  " << e << "\n";
                return 2;
            }
            const RunManifest man = run_scenario(cfg);
            print_manifest(man);
            return man.pass ? 0 : 1;
        }

        if (fr->parsed()) {
            const auto grid = RadialGrid::with_extent(rmax, nodes);
            WarpedMetric m0;
            if (!metric_in.empty())
                m0 = read_metric(metric_in);
            else if (eps == 0.0)
                m0 = make_hyperbolic(n, grid);
            else
                m0 = perturb(n, grid, eps, delta, PerturbOptions{});
            FlowConfig fc;
            fc.t_end = t_end;
            fc.dt_safety = dt_safety;
            fc.snapshot_stride = stride;
            fc.order_delta = delta;
            fc.outer_bc = (outer_bc == "pin-initial") ? OuterBC::PinInitial
                                                      : OuterBC::PinHyperbolic;
            const FlowTrace trace = run(m0, fc);
            std::filesystem::create_directories(out_dir);
            write_metric(out_dir + "/metric_initial.txt", m0);
            write_metric(out_dir + "/metric_final.txt",
                         trace.metric_at(int(trace.snapshots.size()) - 1));
            write_trace_series(out_dir + "/trace.tsv", trace);
            for (const auto& e : trace.events)
                std::printf("event t=%.6f %s: %s\n", e.t, e.kind.c_str(), e.message.c_str());
            const auto& lasts = trace.snapshots.back();
            std::printf("t=%.4f sup|h|=%.6g eps_curv=%.6g eps_order=%.6g %s\n", lasts.t,
                        lasts.sup_h, lasts.eps.eps_curv, lasts.eps.eps_order,
                        trace.completed ? "completed" : "ABORTED");
            return trace.completed ? 0 : 1;
        }

        if (sp->parsed()) {
            const auto grid = RadialGrid::with_extent(sp_rmax, sp_nodes);
            const WarpedMetric m = sp_eps == 0.0
                                       ? make_hyperbolic(sp_n, grid)
                                       : perturb(sp_n, grid, sp_eps, sp_delta, PerturbOptions{});
            const auto est = function_bottom(m);
            std::printf("{\"kind\": \"function-bottom\", \"value\": %s, "
                        "\"domain_radius\": %s, \"grid_spacing\": %s}\n",
                        format_double(est.value).c_str(),
                        format_double(est.domain_radius).c_str(),
                        format_double(est.grid_spacing).c_str());
            return 0;
        }

        if (cv->parsed()) {
            std::vector<double> ds;
            for (int i = 0; i <= cv_steps; ++i)
                ds.push_back(cv_dmax * double(i) / double(cv_steps));
            const auto curve = convolution_ratio_curve(cv_n, cv_a, cv_b, ds);
            for (size_t i = 0; i < curve.D.size(); ++i)
                std::printf("%8.4f  %-22.15g %-22.15g\n", curve.D[i], curve.integral[i],
                            curve.ratio[i]);
            std::printf("empirical_C=%.6g tail_slope=%.4g hypothesis_ok=%d\n",
                        curve.empirical_C, curve.tail_slope, curve.hypothesis_ok ? 1 : 0);
            if (!cv_out.empty()) write_ratio_table(cv_out, curve);
            return 0;
        }

        if (cm->parsed()) {
            const double e0 = find_epsilon0(cm_n, cm_delta, cm_rscan);
            std::printf("epsilon0(n=%d, delta=%g) = %.6g\n", cm_n, cm_delta, e0);
            for (double r : {1.0, 2.0, 5.0, 10.0, 50.0, 200.0})
                std::printf("  M(n, eps0, r=%6.1f) = %.6f\n", r,
                            comparison_margin(cm_n, e0, r).margin);
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
