#pragma once
#include <string>
#include <vector>

#include "nrf/geometry.hpp"

namespace nrf {

enum class OuterBC { PinHyperbolic, PinInitial };

struct FlowConfig {
    double dt_safety = 0.5;   // fraction of the explicit parabolic limit
    double t_end = 1.0;
    int snapshot_stride = 10;
    OuterBC outer_bc = OuterBC::PinHyperbolic;
    double origin_tol = 1e-3;
    double cfl_floor = 1e-12; // dt below this aborts (signals blow-up)
    double collar_fraction = 0.1;
    double order_delta = 1.0; // delta probed by the per-snapshot reports
    int pin_width = 3;        // Dirichlet rows at the outer boundary
    // 6th-order Kreiss-Oliger dissipation on (a, b). The origin ghosts
    // reflect grid-scale noise into modes the centered stencils amplify by
    // 1/b; the damping removes them at O(dr^4) cost on smooth fields.
    double ko_sigma = 1.5;
};

struct FlowState {
    double t = 0.0;
    WarpedMetric metric;
    CurvatureField curv; // cache, re-derivable bit-identically from metric
    double dt_last = 0.0;
};

struct Snapshot {
    double t = 0.0;
    std::vector<double> a, b;
    double sup_h = 0.0;          // over all nodes
    double sup_h_interior = 0.0; // outer collar excluded
    HyperbolicityReport eps;
    double dt = 0.0;
};

struct FlowEvent {
    double t = 0.0;
    std::string kind; // "stability-warning", "boundary-residual", "failure", ...
    std::string message;
};

struct FlowTrace {
    int dim = 0;
    RadialGrid grid;
    FlowConfig config;
    std::vector<Snapshot> snapshots;
    std::vector<FlowEvent> events;
    bool completed = false;

    WarpedMetric metric_at(int snapshot_index) const;
};

FlowState make_state(const WarpedMetric& m0);

// One explicit RK4 step of dg/dt = -2(Ric + (n-1)g) reduced to
// da/dt = -a (n-1)(k_rad+1), db/dt = -b (k_rad + (n-2) k_sph + (n-1)),
// with dt = dt_safety * dr^2 * min(a^2) / 2.
// Throws std::domain_error on positivity loss, std::runtime_error if the
// step falls under cfl_floor.
FlowState step(const FlowState& state, const FlowConfig& config);

// Iterates step() to t_end, recording every snapshot_stride steps. On error
// the partial trace is returned with a "failure" event appended.
FlowTrace run(const WarpedMetric& m0, const FlowConfig& config);

enum class ResidualMutation {
    None,
    FlipGradientSign,  // -2|grad h|^2  ->  +2|grad h|^2
    FlipCurvatureSign, // -4 R.h.h      ->  +4 R.h.h
    AddHCubed,         // append -4 tr(h^3) (the frozen-metric-norm variant)
    SubHCubed,         // append +4 tr(h^3)
};

struct ResidualStats {
    double max_abs = 0.0;
    double max_rel = 0.0;
    double mean_rel = 0.0;
    double scale = 0.0; // magnitude the relative residuals are measured against
    int samples = 0;
    int max_node = -1;      // where the max residual sits
    double max_time = 0.0;
};

// Discrete residual of d|h|^2/dt = Lap|h|^2 - 2|grad h|^2 - 4 R_{ipjq} h_ij h_pq
// over centered snapshot triples. The norm is taken in the evolving metric,
// whose d/dt g^{-1} = +2h contribution cancels the h^3 term; the mutations
// reintroduce it (or flip other single terms) for the fault harness.
ResidualStats evolution_residual(const FlowTrace& trace,
                                 ResidualMutation mutation = ResidualMutation::None);

} // namespace nrf
