#include "nrf/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <random>

#include "nrf/kernels.hpp"

namespace nrf {

namespace {

// The whole perturbation factor must extend EVENLY across r = 0: a smooth
// metric has a even and b odd, so bumps are mirror-symmetrized and the decay
// weight uses the even regularization sqrt(r^2 + 1/4) of r (same decay
// order). An e^{-delta r} cusp would make the perturbed b only C^3 at the
// origin and cost the stencils two orders of accuracy exactly where 1/b
// amplifies them.
double origin_flatten(double r) { return r * r / (1.0 + r * r); }

double even_decay(double r, double delta) {
    return std::exp(-delta * std::sqrt(r * r + 0.25));
}

double bump_shape(BumpProfile p, double r, const PerturbOptions& o,
                  const std::vector<double>& centers,
                  const std::vector<double>& widths,
                  const std::vector<double>& signs) {
    auto mirrored = [](double r2, double c, double w, auto&& shape) {
        return shape((r2 - c) / w) + shape((r2 + c) / w);
    };
    switch (p) {
    case BumpProfile::GaussianBump:
        return -mirrored(r, o.center, o.width,
                         [](double x) { return std::exp(-x * x); });
    case BumpProfile::PolynomialBump:
        return -mirrored(r, o.center, o.width, [](double x) {
            if (std::abs(x) >= 1.0) return 0.0;
            const double u = 1.0 - x * x;
            return u * u * u;
        });
    case BumpProfile::RandomMultibump: {
        double s = 0.0;
        for (size_t j = 0; j < centers.size(); ++j)
            s += signs[j] * mirrored(r, centers[j], widths[j],
                                     [](double x) { return std::exp(-x * x); });
        return s;
    }
    }
    return 0.0;
}

} // namespace

int sixth_order_zone(const RadialGrid& grid) { return grid.index_at(1.0); }

int origin_slave_cells(int dim) {
    if (const char* e = std::getenv("NRF_ORIGIN_CELLS")) return std::atoi(e); // tuning probe
    return std::max(3, dim - 2);
}

void apply_origin_regularity(WarpedMetric& m, int cells) {
    const int s = std::min(cells, m.grid.node_count - 3);
    if (s <= 0) return;
    const double u0 = m.grid.radius(s) * m.grid.radius(s);
    const double u1 = m.grid.radius(s + 1) * m.grid.radius(s + 1);
    const double u2 = m.grid.radius(s + 2) * m.grid.radius(s + 2);
    const double B0 = m.b[size_t(s)] / std::sinh(m.grid.radius(s));
    const double B1 = m.b[size_t(s + 1)] / std::sinh(m.grid.radius(s + 1));
    const double B2 = m.b[size_t(s + 2)] / std::sinh(m.grid.radius(s + 2));
    const double A0 = m.a[size_t(s)], A1 = m.a[size_t(s + 1)], A2 = m.a[size_t(s + 2)];
    for (int i = 0; i < s; ++i) {
        const double u = m.grid.radius(i) * m.grid.radius(i);
        const double l0 = (u - u1) * (u - u2) / ((u0 - u1) * (u0 - u2));
        const double l1 = (u - u0) * (u - u2) / ((u1 - u0) * (u1 - u2));
        const double l2 = (u - u0) * (u - u1) / ((u2 - u0) * (u2 - u1));
        m.a[size_t(i)] = l0 * A0 + l1 * A1 + l2 * A2;
        m.b[size_t(i)] = (l0 * B0 + l1 * B1 + l2 * B2) * std::sinh(m.grid.radius(i));
    }
}

double curvature_noise_floor(double r, double dr4) {
    const double coth = 1.0 / std::tanh(std::max(r, 1e-8));
    return 10.0 * (dr4 * std::max(coth * coth, 1.0) + 1e-14);
}

double WarpedMetric::origin_slope() const {
    // odd cubic fit for b, even quadratic fit for a, through the first cells
    const double dr = grid.dr;
    const double bp0 = (27.0 * b[0] - b[1]) / (12.0 * dr);
    const double a0 = (9.0 * a[0] - a[1]) / 8.0;
    return bp0 / a0;
}

void WarpedMetric::validate(double origin_tol) const {
    if (dim < 3) throw std::invalid_argument("WarpedMetric: dimension must be >= 3");
    if (a.size() != size_t(grid.node_count) || b.size() != size_t(grid.node_count))
        throw std::invalid_argument("WarpedMetric: field sizes do not match grid");
    const size_t n = a.size();
    if (kernels::min_value(a.data(), n) <= 0.0)
        throw std::domain_error("WarpedMetric: radial coefficient a lost positivity");
    if (kernels::min_value(b.data(), n) <= 0.0)
        throw std::domain_error("WarpedMetric: warp coefficient b lost positivity");
    const double slope = origin_slope();
    if (std::abs(slope - 1.0) > origin_tol)
        throw std::domain_error("WarpedMetric: origin slope b'/a = " +
                                std::to_string(slope) + " incompatible with a smooth origin");
}

WarpedMetric make_hyperbolic(int dim, const RadialGrid& grid) {
    if (dim < 3) throw std::invalid_argument("make_hyperbolic: dimension must be >= 3");
    WarpedMetric m;
    m.dim = dim;
    m.grid = grid;
    m.a.assign(size_t(grid.node_count), 1.0);
    m.b.resize(size_t(grid.node_count));
    for (int i = 0; i < grid.node_count; ++i) m.b[size_t(i)] = std::sinh(grid.radius(i));
    return m;
}

WarpedMetric perturb(int dim, const RadialGrid& grid, double eps, double delta,
                     const PerturbOptions& opts) {
    if (dim < 3) throw std::invalid_argument("perturb: dimension must be >= 3");
    if (eps < 0.0) throw std::invalid_argument("perturb: eps must be >= 0");
    if (!(delta > 0.0)) throw std::invalid_argument("perturb: delta must be > 0");

    std::vector<double> centers, widths, signs;
    if (opts.profile == BumpProfile::RandomMultibump) {
        std::mt19937_64 rng(opts.seed);
        std::uniform_real_distribution<double> uc(1.0, std::max(2.0, 0.6 * grid.r_max));
        std::uniform_real_distribution<double> uw(0.4, 1.2);
        std::bernoulli_distribution us(0.5);
        for (int j = 0; j < std::max(1, opts.bump_count); ++j) {
            centers.push_back(uc(rng));
            widths.push_back(uw(rng));
            signs.push_back(us(rng) ? 1.0 : -1.0);
        }
    }

    WarpedMetric m = make_hyperbolic(dim, grid);
    for (int i = 0; i < grid.node_count; ++i) {
        const double r = grid.radius(i);
        const double p = origin_flatten(r) *
                         bump_shape(opts.profile, r, opts, centers, widths, signs) *
                         even_decay(r, delta);
        const double factor = 1.0 + eps * p;
        m.a[size_t(i)] = factor;
        m.b[size_t(i)] *= factor;
    }
    const size_t n = m.a.size();
    if (kernels::min_value(m.a.data(), n) <= 0.0 || kernels::min_value(m.b.data(), n) <= 0.0)
        throw std::domain_error("perturb: eps too large, warp positivity violated");
    return m;
}

CurvatureField curvature(const WarpedMetric& m) {
    const int n = m.grid.node_count;
    if (n < 16) throw std::invalid_argument("curvature: grid too coarse (node_count < 16)");
    const int zone = sixth_order_zone(m.grid);
    const auto da = d_dr(m.a, Parity::Even, m.grid.dr, zone);
    const auto db = d_dr(m.b, Parity::Odd, m.grid.dr, zone);
    const auto d2b = d2_dr2(m.b, Parity::Odd, m.grid.dr, zone);

    CurvatureField c;
    c.k_rad.resize(size_t(n));
    c.k_sph.resize(size_t(n));
    kernels::curvature_core(m.a.data(), m.b.data(), da.data(), db.data(), d2b.data(),
                            c.k_rad.data(), c.k_sph.data(), size_t(n));

    // Reported k_sph at the first cells: (1 - b_s^2)/b^2 there amplifies
    // sub-resolution noise by 1/b^2 ~ 4/dr^2, so use the quadratic limit form
    // k_sph = k_rad + (r/r_j)^2 (k_sph - k_rad)(r_j) instead (they agree at
    // r = 0 for any smooth metric; all weights are <= 1).
    const int mcell = std::min(origin_slave_cells(m.dim) + 2, n - 1);
    if (mcell > 0) {
        const double rj = m.grid.radius(mcell);
        const double dd = c.k_sph[size_t(mcell)] - c.k_rad[size_t(mcell)];
        for (int i = 0; i < mcell; ++i) {
            const double w = m.grid.radius(i) / rj;
            c.k_sph[size_t(i)] = c.k_rad[size_t(i)] + w * w * dd;
        }
    }

    const double nm1 = double(m.dim - 1);
    const double nm2 = double(m.dim - 2);
    c.ric_rad.resize(size_t(n));
    c.ric_tan.resize(size_t(n));
    c.h_rad.resize(size_t(n));
    c.h_tan.resize(size_t(n));
    c.h_norm.resize(size_t(n));
    c.q_norm.resize(size_t(n));
    for (size_t i = 0; i < size_t(n); ++i) {
        c.ric_rad[i] = nm1 * c.k_rad[i];
        c.ric_tan[i] = c.k_rad[i] + nm2 * c.k_sph[i];
        c.h_rad[i] = c.ric_rad[i] + nm1;
        c.h_tan[i] = c.ric_tan[i] + nm1;
        c.h_norm[i] = std::sqrt(c.h_rad[i] * c.h_rad[i] + nm1 * c.h_tan[i] * c.h_tan[i]);
        const double qr = c.k_rad[i] + 1.0;
        const double qs = c.k_sph[i] + 1.0;
        c.q_norm[i] = std::sqrt(4.0 * nm1 * qr * qr + 2.0 * nm1 * nm2 * qs * qs);
    }
    return c;
}

HyperbolicityReport hyperbolicity(const WarpedMetric& m, const CurvatureField& c,
                                  double delta, double collar_fraction) {
    const int n = m.grid.node_count;
    HyperbolicityReport rep;
    rep.delta = delta;

    for (int i = 0; i < n; ++i) {
        const double r = m.grid.radius(i);
        const double ratio_a = m.a[size_t(i)] * m.a[size_t(i)] - 1.0;
        const double q = m.b[size_t(i)] / std::sinh(r);
        const double ratio_b = q * q - 1.0;
        rep.eps_metric = std::max(rep.eps_metric, std::max(std::abs(ratio_a), std::abs(ratio_b)));
        const double kdev = std::max(std::abs(c.k_rad[size_t(i)] + 1.0),
                                     std::abs(c.k_sph[size_t(i)] + 1.0));
        rep.eps_curv = std::max(rep.eps_curv, kdev);
    }

    // Weighted sups skip the outer collar (boundary pinning) and mask nodes
    // whose deviation sits at the discretization floor: e^{delta r} amplifies
    // stencil truncation exponentially, so noise-level nodes are not
    // measurements of the decay order.
    const int last = n - std::max(0, int(std::ceil(collar_fraction * n)));
    const auto s = arclength(m.a, m.grid.dr);
    const double dr4 = std::pow(m.grid.dr, 4);
    for (int i = 0; i < last; ++i) {
        const double kdev = std::max(std::abs(c.k_rad[size_t(i)] + 1.0),
                                     std::abs(c.k_sph[size_t(i)] + 1.0));
        if (kdev <= curvature_noise_floor(m.grid.radius(i), dr4)) continue;
        rep.eps_order = std::max(rep.eps_order, kdev * std::exp(delta * m.grid.radius(i)));
        rep.eps_order_arclength =
            std::max(rep.eps_order_arclength, kdev * std::exp(delta * s[size_t(i)]));
    }
    return rep;
}

HyperbolicityReport hyperbolicity(const WarpedMetric& m, double delta,
                                  double collar_fraction) {
    return hyperbolicity(m, curvature(m), delta, collar_fraction);
}

namespace {

// local cubic Lagrange interpolation on a strictly increasing table
double interp_cubic(const std::vector<double>& x, const std::vector<double>& y, double xq) {
    const int n = int(x.size());
    auto it = std::upper_bound(x.begin(), x.end(), xq);
    int k = int(it - x.begin());
    int i0 = std::clamp(k - 2, 0, n - 4);
    double result = 0.0;
    for (int j = i0; j < i0 + 4; ++j) {
        double lj = 1.0;
        for (int l = i0; l < i0 + 4; ++l) {
            if (l == j) continue;
            lj *= (xq - x[size_t(l)]) / (x[size_t(j)] - x[size_t(l)]);
        }
        result += lj * y[size_t(j)];
    }
    return result;
}

} // namespace

WarpedMetric regauge_to_arclength(const WarpedMetric& m) {
    const int n = m.grid.node_count;
    const auto s = arclength(m.a, m.grid.dr);
    double total = 0.0;
    for (int i = 0; i < n; ++i) total += m.grid.dr * m.a[size_t(i)];

    WarpedMetric out;
    out.dim = m.dim;
    out.grid = RadialGrid::with_count(n, total / n);
    out.a.assign(size_t(n), 1.0);
    out.b.resize(size_t(n));
    for (int i = 0; i < n; ++i) out.b[size_t(i)] = interp_cubic(s, m.b, out.grid.radius(i));
    return out;
}

WarpedMetric regauge_to_grid(const WarpedMetric& s_gauge, const WarpedMetric& reference) {
    const auto s = arclength(reference.a, reference.grid.dr);
    WarpedMetric out = reference;
    for (int i = 0; i < reference.grid.node_count; ++i)
        out.b[size_t(i)] = interp_cubic(s_gauge.grid.nodes, s_gauge.b, s[size_t(i)]);
    return out;
}

} // namespace nrf
