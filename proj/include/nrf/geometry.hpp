#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "nrf/grid.hpp"

namespace nrf {

// Rotationally symmetric metric g = a(r)^2 dr^2 + b(r)^2 ghat_{S^{n-1}}.
// The hyperbolic reference is a == 1, b = sinh r.
struct WarpedMetric {
    int dim = 0;          // n >= 3
    RadialGrid grid;
    std::vector<double> a;
    std::vector<double> b;

    // b'(0)/a(0) from the parity extension; 1 for any metric smooth at the
    // origin. Uses the odd/even Taylor fits through the first two cells.
    double origin_slope() const;

    // Throws std::domain_error on positivity loss or origin incompatibility.
    void validate(double origin_tol = 1e-3) const;
};

struct CurvatureField {
    std::vector<double> k_rad;   // planes containing d/dr: -b_ss/b
    std::vector<double> k_sph;   // purely angular planes: (1 - b_s^2)/b^2
    std::vector<double> ric_rad; // (n-1) k_rad
    std::vector<double> ric_tan; // k_rad + (n-2) k_sph
    std::vector<double> h_rad;   // ric_rad + (n-1)
    std::vector<double> h_tan;   // ric_tan + (n-1)
    std::vector<double> h_norm;  // sqrt(h_rad^2 + (n-1) h_tan^2)
    std::vector<double> q_norm;  // |R_{ipjq} - (g_ij g_pq - g_iq g_jp)|
};

struct HyperbolicityReport {
    double eps_metric = 0.0;          // sup max(|a^2-1|, |b^2/sinh^2 r - 1|)
    double eps_curv = 0.0;            // sup max(|k_rad+1|, |k_sph+1|)
    double eps_order = 0.0;           // sup of the above * e^{delta r}, collar excluded
    double eps_order_arclength = 0.0; // same with e^{delta s}, s = int a dr
    double delta = 0.0;
};

enum class BumpProfile { GaussianBump, PolynomialBump, RandomMultibump };

struct PerturbOptions {
    BumpProfile profile = BumpProfile::GaussianBump;
    double center = 2.0;
    double width = 0.8;
    int bump_count = 4;       // random-multibump only
    std::uint64_t seed = 1;
};

WarpedMetric make_hyperbolic(int dim, const RadialGrid& grid);

// a = 1 + eps q(r) e^{-delta r}, b = sinh r (1 + eps p(r) e^{-delta r}) with
// the profile flattened to O(r^2) at the origin. The realized epsilon is
// whatever hyperbolicity() reports, not the knob.
WarpedMetric perturb(int dim, const RadialGrid& grid, double eps, double delta,
                     const PerturbOptions& opts = {});

CurvatureField curvature(const WarpedMetric& m);

HyperbolicityReport hyperbolicity(const WarpedMetric& m, double delta,
                                  double collar_fraction = 0.1);
HyperbolicityReport hyperbolicity(const WarpedMetric& m, const CurvatureField& c,
                                  double delta, double collar_fraction = 0.1);

// Resample onto a uniform grid in the arclength coordinate (a == 1 gauge).
// Diagnostic only; the flow itself evolves both coefficients.
WarpedMetric regauge_to_arclength(const WarpedMetric& m);
// Sample a regauged metric back onto the radial grid of `reference`.
WarpedMetric regauge_to_grid(const WarpedMetric& s_gauge, const WarpedMetric& reference);

// Node index bound of the 6th-order stencil zone for this grid (r < 1).
int sixth_order_zone(const RadialGrid& grid);

// Number of origin cells the flow slaves to a regularity condition instead
// of evolving. Their curvature feedback is amplified by 1/b ~ 2/(i dr), and
// the coupled (a, b) system has unstable origin-reflected modes there that
// no explicit step can damp.
int origin_slave_cells(int dim);

// Regularity condition at r = 0: overwrite cells [0, cells) of a and of
// B = b/sinh(r) with the quadratic-in-r^2 extension of nodes
// {cells, cells+1, cells+2} (both fields are smooth and even).
void apply_origin_regularity(WarpedMetric& m, int cells);

// Smallest |K+1| the stencils can resolve at radius r (truncation plus
// roundoff); dr4 = dr^4. Deviations below this are masked out of the
// order-delta weighted sups.
double curvature_noise_floor(double r, double dr4);

} // namespace nrf
