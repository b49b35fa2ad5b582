#pragma once
#include <vector>

#include "nrf/flow.hpp"

namespace nrf {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double rms = 0.0; // rms of fit residuals
    int count = 0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// Rate constants of the decay machinery. The non-constructive C_i(eps) are
// represented by one slack parameter.
struct DecayPrediction {
    int n = 6;
    double lambda = 6.25;       // <= (n-1)^2/4
    double spatial_rate = 4.5;  // 2 sqrt(lambda) - slack
    double alpha = 2.25;        // min(delta, spatial_rate / 2)
    double slack = 0.5;

    static DecayPrediction for_dimension(int n, double delta, double slack = 0.5);
};

// Gaussian-in-distance weight xi(y,s) = -d0(y)^2 / ((2+C5)(t-s)), d0 the
// g(0)-arclength distance to the ball of radius sqrt(eta)/2 around the base
// node; e^xi == 1 on the ball.
struct WeightParams {
    int x_index = 0;
    double t_ref = 1.0;
    double C5 = 0.0;
    double eta = 0.1;
    // The paper's integrals run over complete H^n; on the truncated domain
    // the b^{n-1} volume weight makes naive global integrals boundary
    // dominated, so quadratures skip the pinned outer collar.
    double collar_fraction = 0.1;
};

struct WeightField {
    WeightParams params;
    std::vector<double> d0;       // per node
    double max_residual = 0.0;    // max over nodes and snapshot times of xi_s + |grad xi|^2/2
    std::vector<double> residual_sup; // per usable snapshot
    std::vector<double> times;
};

// Evaluates xi_s + 1/2 |grad xi|^2 with the gradient in g(s) and d0 in g(0):
//   d0^2/(t-s)^2 * ( -1/(2+C5) + 2 (a0/a_s)^2/(2+C5)^2 ).
// Throws std::invalid_argument if t_ref is not past the first snapshot.
WeightField weight_residual(const FlowTrace& trace, const WeightParams& p);

// Smallest C5 in [0, c5_hi] with residual <= 0 everywhere (bisection).
double bisect_weight_c5(const FlowTrace& trace, int x_index, double t_ref,
                        double eta = 0.1, double c5_hi = 1.0);

struct EnergySeries {
    std::vector<double> times;
    std::vector<double> I;         // int |h|^2 e^xi dV(g(s)), truncated at 1e-30
    std::vector<double> log_slope; // centered d(log I)/ds, aligned with times
    int truncated_at = -1;         // first snapshot where I hit the floor
};

EnergySeries weighted_energy(const FlowTrace& trace, const WeightParams& p);

struct FitWindows {
    double t_lo = 0.2;
    double t_hi = 1e300; // clamped to the trace end
    double r_lo = 3.0;
    double r_hi = 10.0;
};

struct DecayReport {
    double temporal_rate = 0.0;  // slope of -log sup|h| vs t (interior sup)
    double temporal_rms = 0.0;
    double spatial_order = 0.0;  // slope of -log max(|k+1|) vs arclength at t_end
    double spatial_rms = 0.0;
    double accumulation = 0.0;   // int sup|h| dt (trapezoid over snapshots)
    double k_max = 0.0;          // max sectional curvature at t_end
    double h_min = 0.0;          // min h eigenvalue at t_end
    bool theorem2_verdict = false;
    bool low_confidence = false; // a fit residual exceeded its threshold
};

DecayReport fit_decay(const FlowTrace& trace, const DecayPrediction& pred,
                      const FitWindows& w, double sign_tol = 1e-3);

struct CertificateOptions {
    std::vector<int> x_indices;
    std::vector<double> times;
    double C5 = 0.5;       // from pred.slack by default in the caller
    double eta = 0.1;
    // |h|^2 below this counts as zero; negative selects the stencil noise
    // floor (n * curvature_noise_floor at the sample radius, squared)
    double lhs_floor = -1.0;
    double collar_fraction = 0.1;  // outer collar excluded from the quadrature
};

struct Certificate {
    double C = 0.0;  // smallest constant with |h|^2(x,t) <= C * RHS on all samples
    int samples = 0;
    int skipped = 0; // RHS underflow
};

// RHS(x,t) = int |h|^2(y,0) exp(-d0(y)^2/((2+C5)t) - (2 lambda - C10) t) dV_0(y)
// with C5 = C10 = pred.slack.
Certificate pointwise_certificate(const FlowTrace& trace, const DecayPrediction& pred,
                                  const CertificateOptions& opt);

} // namespace nrf
