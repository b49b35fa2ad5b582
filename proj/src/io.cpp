#include "nrf/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace nrf {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_metric(const std::string& path, const WarpedMetric& m) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_metric: cannot open " + path);
    out << "# nrflow-metric n=" << m.dim << " dr=" << format_double(m.grid.dr)
        << " node_count=" << m.grid.node_count << "\n";
    for (int i = 0; i < m.grid.node_count; ++i)
        out << format_double(m.grid.radius(i)) << ' ' << format_double(m.a[size_t(i)])
            << ' ' << format_double(m.b[size_t(i)]) << "\n";
}

WarpedMetric read_metric(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_metric: cannot open " + path);
    std::string header;
    std::getline(in, header);
    int dim = 0, count = 0;
    double dr = 0.0;
    if (std::sscanf(header.c_str(), "# nrflow-metric n=%d dr=%lf node_count=%d", &dim,
                    &dr, &count) != 3)
        throw std::runtime_error("read_metric: bad header in " + path);
    WarpedMetric m;
    m.dim = dim;
    m.grid = RadialGrid::with_count(count, dr);
    m.a.resize(size_t(count));
    m.b.resize(size_t(count));
    for (int i = 0; i < count; ++i) {
        double r;
        if (!(in >> r >> m.a[size_t(i)] >> m.b[size_t(i)]))
            throw std::runtime_error("read_metric: truncated file " + path);
    }
    return m;
}

void write_trace_series(const std::string& path, const FlowTrace& trace) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_trace_series: cannot open " + path);
    out << "# t sup_h sup_h_interior eps_metric eps_curv eps_order eps_order_arc dt\n";
    for (const auto& s : trace.snapshots) {
        out << format_double(s.t) << ' ' << format_double(s.sup_h) << ' '
            << format_double(s.sup_h_interior) << ' ' << format_double(s.eps.eps_metric)
            << ' ' << format_double(s.eps.eps_curv) << ' ' << format_double(s.eps.eps_order)
            << ' ' << format_double(s.eps.eps_order_arclength) << ' '
            << format_double(s.dt) << "\n";
    }
}

void write_curvature_records(const std::string& path, const WarpedMetric& m,
                             const CurvatureField& c, const HyperbolicityReport& rep) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_curvature_records: cannot open " + path);
    for (int i = 0; i < m.grid.node_count; ++i) {
        nlohmann::json j{{"r", m.grid.radius(i)},
                         {"k_rad", c.k_rad[size_t(i)]},
                         {"k_sph", c.k_sph[size_t(i)]},
                         {"ric_rad", c.ric_rad[size_t(i)]},
                         {"ric_tan", c.ric_tan[size_t(i)]},
                         {"h_norm", c.h_norm[size_t(i)]},
                         {"q_norm", c.q_norm[size_t(i)]}};
        out << j.dump() << "\n";
    }
    nlohmann::json summary{{"summary", true},
                           {"n", m.dim},
                           {"eps_metric", rep.eps_metric},
                           {"eps_curv", rep.eps_curv},
                           {"eps_order", rep.eps_order},
                           {"eps_order_arclength", rep.eps_order_arclength},
                           {"delta", rep.delta}};
    out << summary.dump() << "\n";
}

void write_ratio_table(const std::string& path, const RatioCurve& curve) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_ratio_table: cannot open " + path);
    out << "# D integral ratio\n";
    for (size_t i = 0; i < curve.D.size(); ++i)
        out << format_double(curve.D[i]) << ' ' << format_double(curve.integral[i]) << ' '
            << format_double(curve.ratio[i]) << "\n";
    out << "# empirical_C=" << format_double(curve.empirical_C)
        << " tail_slope=" << format_double(curve.tail_slope)
        << " hypothesis_ok=" << (curve.hypothesis_ok ? 1 : 0) << "\n";
}

} // namespace nrf
