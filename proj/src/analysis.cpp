#include "nrf/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nrf/integrals.hpp"
#include "nrf/kernels.hpp"

namespace nrf {

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("fit_line: need two or more points");
    const double n = double(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    LineFit f;
    const double det = n * sxx - sx * sx;
    if (det == 0.0) throw std::invalid_argument("fit_line: degenerate abscissae");
    f.slope = (n * sxy - sx * sy) / det;
    f.intercept = (sy - f.slope * sx) / n;
    double ss = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (f.slope * x[i] + f.intercept);
        ss += r * r;
    }
    f.rms = std::sqrt(ss / n);
    f.count = int(x.size());
    return f;
}

DecayPrediction DecayPrediction::for_dimension(int n, double delta, double slack) {
    DecayPrediction p;
    p.n = n;
    p.lambda = double(n - 1) * double(n - 1) / 4.0;
    p.slack = slack;
    p.spatial_rate = 2.0 * std::sqrt(p.lambda) - slack;
    p.alpha = std::min(delta, p.spatial_rate / 2.0);
    return p;
}

namespace {

// g(0)-arclength distance to the ball of radius sqrt(eta)/2 around node x
std::vector<double> ball_distance(const FlowTrace& trace, int x_index, double eta) {
    const WarpedMetric m0 = trace.metric_at(0);
    const auto s0 = arclength(m0.a, m0.grid.dr);
    const double center = s0[size_t(x_index)];
    const double rad = 0.5 * std::sqrt(eta);
    std::vector<double> d0(s0.size());
    for (size_t i = 0; i < s0.size(); ++i)
        d0[i] = std::max(0.0, std::abs(s0[i] - center) - rad);
    return d0;
}

std::vector<double> h2_field(const FlowTrace& trace, int k) {
    const CurvatureField c = curvature(trace.metric_at(k));
    const double nm1 = double(trace.dim - 1);
    std::vector<double> H2(c.h_rad.size());
    for (size_t i = 0; i < H2.size(); ++i)
        H2[i] = c.h_rad[i] * c.h_rad[i] + nm1 * c.h_tan[i] * c.h_tan[i];
    return H2;
}

} // namespace

WeightField weight_residual(const FlowTrace& trace, const WeightParams& p) {
    if (trace.snapshots.empty()) throw std::invalid_argument("weight_residual: empty trace");
    if (p.t_ref <= trace.snapshots.front().t)
        throw std::invalid_argument("weight_residual: t_ref must lie past the first snapshot");
    if (p.x_index < 0 || p.x_index >= trace.grid.node_count)
        throw std::invalid_argument("weight_residual: base node out of range");

    WeightField w;
    w.params = p;
    w.d0 = ball_distance(trace, p.x_index, p.eta);
    const WarpedMetric m0 = trace.metric_at(0);

    w.max_residual = -1e300;
    for (size_t k = 0; k < trace.snapshots.size(); ++k) {
        const double s = trace.snapshots[k].t;
        if (s >= p.t_ref) break;
        const double dt2 = (p.t_ref - s) * (p.t_ref - s);
        double sup = -1e300;
        for (size_t i = 0; i < w.d0.size(); ++i) {
            const double ratio = m0.a[i] / trace.snapshots[k].a[i];
            const double factor =
                -1.0 / (2.0 + p.C5) + 2.0 * ratio * ratio / ((2.0 + p.C5) * (2.0 + p.C5));
            sup = std::max(sup, w.d0[i] * w.d0[i] / dt2 * factor);
        }
        w.residual_sup.push_back(sup);
        w.times.push_back(s);
        w.max_residual = std::max(w.max_residual, sup);
    }
    if (w.times.empty())
        throw std::invalid_argument("weight_residual: no snapshots precede t_ref");
    return w;
}

double bisect_weight_c5(const FlowTrace& trace, int x_index, double t_ref, double eta,
                        double c5_hi) {
    WeightParams p{x_index, t_ref, 0.0, eta};
    if (weight_residual(trace, p).max_residual <= 0.0) return 0.0;
    p.C5 = c5_hi;
    if (weight_residual(trace, p).max_residual > 0.0)
        throw std::runtime_error("bisect_weight_c5: even C5 = " + std::to_string(c5_hi) +
                                 " does not close the weight inequality");
    double lo = 0.0, hi = c5_hi;
    while (hi - lo > 1e-6) {
        p.C5 = 0.5 * (lo + hi);
        (weight_residual(trace, p).max_residual <= 0.0 ? hi : lo) = p.C5;
    }
    return hi;
}

EnergySeries weighted_energy(const FlowTrace& trace, const WeightParams& p) {
    if (trace.snapshots.size() < 2)
        throw std::invalid_argument("weighted_energy: need at least 2 snapshots");
    const auto d0 = ball_distance(trace, p.x_index, p.eta);
    const double omega = sphere_volume(trace.dim - 1);
    const double dr = trace.grid.dr;

    EnergySeries es;
    const size_t last =
        trace.snapshots.front().a.size() -
        size_t(std::ceil(p.collar_fraction * double(trace.snapshots.front().a.size())));
    for (size_t k = 0; k < trace.snapshots.size(); ++k) {
        const double s = trace.snapshots[k].t;
        if (s >= p.t_ref) break;
        const auto H2 = h2_field(trace, int(k));
        const auto& snap = trace.snapshots[k];
        double I = 0.0;
        for (size_t i = 0; i < last; ++i) {
            const double xi = -d0[i] * d0[i] / ((2.0 + p.C5) * (p.t_ref - s));
            I += H2[i] * std::exp(xi) * snap.a[i] *
                 std::pow(snap.b[i], double(trace.dim - 1)) * dr;
        }
        I *= omega;
        if (I < 1e-30) {
            es.truncated_at = int(k);
            break;
        }
        es.times.push_back(s);
        es.I.push_back(I);
    }
    es.log_slope.assign(es.times.size(), 0.0);
    for (size_t k = 1; k + 1 < es.times.size(); ++k)
        es.log_slope[k] = (std::log(es.I[k + 1]) - std::log(es.I[k - 1])) /
                          (es.times[k + 1] - es.times[k - 1]);
    if (es.times.size() >= 2) {
        es.log_slope.front() = (std::log(es.I[1]) - std::log(es.I[0])) /
                               (es.times[1] - es.times[0]);
        const size_t n = es.times.size();
        es.log_slope[n - 1] = (std::log(es.I[n - 1]) - std::log(es.I[n - 2])) /
                              (es.times[n - 1] - es.times[n - 2]);
    }
    return es;
}

DecayReport fit_decay(const FlowTrace& trace, const DecayPrediction& pred,
                      const FitWindows& w, double sign_tol) {
    if (trace.snapshots.size() < 4)
        throw std::invalid_argument("fit_decay: trace too short");
    DecayReport rep;

    // temporal rate from the interior sup|h| series
    std::vector<double> ts, ys;
    const double t_hi = std::min(w.t_hi, trace.snapshots.back().t);
    for (const auto& s : trace.snapshots) {
        if (s.t < w.t_lo || s.t > t_hi) continue;
        if (s.sup_h_interior <= 0.0) continue;
        ts.push_back(s.t);
        ys.push_back(-std::log(s.sup_h_interior));
    }
    if (ts.size() < 2) throw std::invalid_argument("fit_decay: temporal window is empty");
    const LineFit tf = fit_line(ts, ys);
    rep.temporal_rate = tf.slope;
    rep.temporal_rms = tf.rms;

    // spatial order of |K+1| against arclength at the final time
    const int last = int(trace.snapshots.size()) - 1;
    const WarpedMetric mf = trace.metric_at(last);
    const CurvatureField cf = curvature(mf);
    const auto s_arc = arclength(mf.a, mf.grid.dr);
    std::vector<double> xs2, ys2;
    for (int i = 0; i < trace.grid.node_count; ++i) {
        const double r = trace.grid.radius(i);
        if (r < w.r_lo || r > w.r_hi) continue;
        const double kdev = std::max(std::abs(cf.k_rad[size_t(i)] + 1.0),
                                     std::abs(cf.k_sph[size_t(i)] + 1.0));
        if (kdev <= 0.0) continue;
        xs2.push_back(s_arc[size_t(i)]);
        ys2.push_back(-std::log(kdev));
    }
    if (xs2.size() < 8) throw std::invalid_argument("fit_decay: spatial window is empty");
    const LineFit sf = fit_line(xs2, ys2);
    rep.spatial_order = sf.slope;
    rep.spatial_rms = sf.rms;
    rep.low_confidence = (sf.rms > 1.0) || (tf.rms > 1.0);

    // accumulation integral of sup|h| over the trace
    for (size_t k = 1; k < trace.snapshots.size(); ++k) {
        const auto& s0 = trace.snapshots[k - 1];
        const auto& s1 = trace.snapshots[k];
        rep.accumulation += 0.5 * (s0.sup_h_interior + s1.sup_h_interior) * (s1.t - s0.t);
    }

    rep.k_max = -1e300;
    rep.h_min = 1e300;
    for (size_t i = 0; i < cf.k_rad.size(); ++i) {
        rep.k_max = std::max({rep.k_max, cf.k_rad[i], cf.k_sph[i]});
        rep.h_min = std::min({rep.h_min, cf.h_rad[i], cf.h_tan[i]});
    }
    rep.theorem2_verdict = (rep.spatial_order > 2.0) && (rep.k_max <= sign_tol) &&
                           (rep.h_min >= -sign_tol);
    (void)pred;
    return rep;
}

Certificate pointwise_certificate(const FlowTrace& trace, const DecayPrediction& pred,
                                  const CertificateOptions& opt) {
    if (trace.snapshots.empty())
        throw std::invalid_argument("pointwise_certificate: empty trace");
    const WarpedMetric m0 = trace.metric_at(0);
    const auto H2_0 = h2_field(trace, 0);
    const auto s0 = arclength(m0.a, m0.grid.dr);
    const double omega = sphere_volume(trace.dim - 1);
    const double dr = trace.grid.dr;
    const double C5 = opt.C5, C10 = pred.slack;
    const double rate = 2.0 * pred.lambda - C10;

    Certificate cert;
    for (int xi : opt.x_indices) {
        if (xi < 0 || xi >= trace.grid.node_count)
            throw std::invalid_argument("pointwise_certificate: sample node out of range");
        const double center = s0[size_t(xi)];
        const double rad = 0.5 * std::sqrt(opt.eta);
        for (double t : opt.times) {
            // nearest snapshot at or before t
            int k = -1;
            for (size_t j = 0; j < trace.snapshots.size(); ++j)
                if (trace.snapshots[j].t <= t * (1.0 + 1e-12)) k = int(j);
            if (k < 1) continue;

            double rhs = 0.0;
            const size_t last =
                H2_0.size() - size_t(std::ceil(opt.collar_fraction * double(H2_0.size())));
            for (size_t i = 0; i < last; ++i) {
                const double d0 = std::max(0.0, std::abs(s0[i] - center) - rad);
                const double expo = -d0 * d0 / ((2.0 + C5) * t) - rate * t;
                rhs += H2_0[i] * std::exp(expo) * m0.a[i] *
                       std::pow(m0.b[i], double(trace.dim - 1)) * dr;
            }
            rhs *= omega;
            ++cert.samples;
            if (rhs < 1e-300) {
                ++cert.skipped;
                continue;
            }
            const auto H2_t = h2_field(trace, k);
            const double lhs = H2_t[size_t(xi)];
            double floor = opt.lhs_floor;
            if (floor < 0.0) {
                const double hfl = double(trace.dim) *
                                   curvature_noise_floor(trace.grid.radius(xi),
                                                         std::pow(trace.grid.dr, 4));
                floor = hfl * hfl;
            }
            if (lhs <= floor) continue; // noise floor counts as zero
            cert.C = std::max(cert.C, lhs / rhs);
        }
    }
    return cert;
}

} // namespace nrf
