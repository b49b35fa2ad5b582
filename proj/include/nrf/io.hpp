#pragma once
#include <string>

#include "nrf/flow.hpp"
#include "nrf/integrals.hpp"

namespace nrf {

// Columnar metric format: one header line "# nrflow-metric n=<dim> dr=<dr>
// node_count=<N>" followed by "r a b" rows, 17 significant digits.
void write_metric(const std::string& path, const WarpedMetric& m);
WarpedMetric read_metric(const std::string& path);

// Time-series export: "t sup_h sup_h_interior eps_metric eps_curv eps_order
// eps_order_arc dt" rows.
void write_trace_series(const std::string& path, const FlowTrace& trace);

// One JSON record per node plus a closing summary record (JSON lines).
void write_curvature_records(const std::string& path, const WarpedMetric& m,
                             const CurvatureField& c, const HyperbolicityReport& rep);

// Columnar sweep "D integral ratio" plus a summary comment line.
void write_ratio_table(const std::string& path, const RatioCurve& curve);

std::string format_double(double v); // shortest round-trip decimal

} // namespace nrf
