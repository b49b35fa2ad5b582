#include "nrf/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "nrf/kernels.hpp"

namespace nrf {

namespace {

struct SLWeights {
    std::vector<double> P;     // b^{n-1}/a at nodes
    std::vector<double> W;     // a b^{n-1} at nodes
    std::vector<double> Pface; // P at interior faces, Pface[i] ~ r=(i+1)dr
    double P_outer = 0.0;      // extrapolated P at the Dirichlet face
};

SLWeights sl_weights(const WarpedMetric& m) {
    const int n = m.grid.node_count;
    SLWeights w;
    w.P.resize(size_t(n));
    w.W.resize(size_t(n));
    for (int i = 0; i < n; ++i) {
        const double bp = std::pow(m.b[size_t(i)], double(m.dim - 1));
        w.P[size_t(i)] = bp / m.a[size_t(i)];
        w.W[size_t(i)] = bp * m.a[size_t(i)];
    }
    w.Pface.resize(size_t(n - 1));
    for (int i = 0; i + 1 < n; ++i)
        w.Pface[size_t(i)] = 0.5 * (w.P[size_t(i)] + w.P[size_t(i + 1)]);
    w.P_outer = 1.5 * w.P[size_t(n - 1)] - 0.5 * w.P[size_t(n - 2)];
    return w;
}

// eigenvalue count of (T - lambda I) below zero via the LDL^T recurrence;
// T is the symmetrized tridiagonal with diagonal d and off-diagonal e.
int sturm_count(const std::vector<double>& d, const std::vector<double>& e, double lambda) {
    int count = 0;
    double q = d[0] - lambda;
    if (q < 0.0) ++count;
    for (size_t i = 1; i < d.size(); ++i) {
        double denom = q;
        if (denom == 0.0) denom = 1e-300;
        q = d[i] - lambda - e[i - 1] * e[i - 1] / denom;
        if (q < 0.0) ++count;
    }
    return count;
}

} // namespace

SpectralEstimate function_bottom(const WarpedMetric& m) {
    const int n = m.grid.node_count;
    const double dr = m.grid.dr;
    const SLWeights w = sl_weights(m);

    // symmetric tridiagonal: no flux through the origin face, Dirichlet value
    // on the outer face (ghost reflection doubles the outer conductance)
    std::vector<double> d(size_t(n), 0.0), e(size_t(n - 1), 0.0);
    for (int i = 0; i < n; ++i) {
        const double p_lo = (i == 0) ? 0.0 : w.Pface[size_t(i - 1)];
        const double p_hi = (i == n - 1) ? 2.0 * w.P_outer : w.Pface[size_t(i)];
        d[size_t(i)] = (p_lo + p_hi) / (w.W[size_t(i)] * dr * dr);
    }
    for (int i = 0; i + 1 < n; ++i)
        e[size_t(i)] = -w.Pface[size_t(i)] /
                       (std::sqrt(w.W[size_t(i)] * w.W[size_t(i + 1)]) * dr * dr);

    double hi = 0.0;
    for (int i = 0; i < n; ++i) {
        double row = d[size_t(i)];
        if (i > 0) row += std::abs(e[size_t(i - 1)]);
        if (i + 1 < n) row += std::abs(e[size_t(i)]);
        hi = std::max(hi, row);
    }
    double lo = 0.0;
    if (sturm_count(d, e, lo) != 0)
        lo = -hi; // perturbed metrics may bend the bottom below zero
    int iters = 0;
    while (hi - lo > 1e-10) {
        if (++iters > 300)
            throw std::runtime_error("function_bottom: bisection failed to converge");
        const double mid = 0.5 * (lo + hi);
        if (sturm_count(d, e, mid) >= 1)
            hi = mid;
        else
            lo = mid;
    }

    SpectralEstimate est;
    est.value = 0.5 * (lo + hi);
    est.kind = SpectralKind::FunctionBottom;
    est.domain_radius = m.grid.r_max;
    est.grid_spacing = dr;
    return est;
}

SpectralEstimate rayleigh_function(const WarpedMetric& m, const std::vector<double>& f) {
    const int n = m.grid.node_count;
    if (int(f.size()) != n)
        throw std::invalid_argument("rayleigh_function: profile size mismatch");
    const double dr = m.grid.dr;
    const SLWeights w = sl_weights(m);

    double num = 0.0, den = 0.0;
    for (int i = 0; i + 1 < n; ++i) {
        const double df = (f[size_t(i + 1)] - f[size_t(i)]) / dr;
        num += df * df * w.Pface[size_t(i)] * dr;
    }
    for (int i = 0; i < n; ++i) den += f[size_t(i)] * f[size_t(i)] * w.W[size_t(i)] * dr;
    if (den <= 0.0) throw std::domain_error("rayleigh_function: zero denominator");

    SpectralEstimate est;
    est.value = num / den;
    est.kind = SpectralKind::FunctionRayleigh;
    est.domain_radius = m.grid.r_max;
    est.grid_spacing = dr;
    return est;
}

namespace {

double tensor_weight(TensorForm form, int dim, double bs_over_b, double b) {
    if (form == TensorForm::RadialTraceless)
        return 2.0 * double(dim) * bs_over_b * bs_over_b;
    if (dim < 4)
        throw std::invalid_argument(
            "tensor_rayleigh: the sphere-traceless form needs n >= 4 (its gradient "
            "integral diverges at n = 3)");
    const double c_n = 2.0 * double(dim - 1) / double(dim - 3);
    return 2.0 * bs_over_b * bs_over_b + c_n / (b * b);
}

} // namespace

SpectralEstimate tensor_rayleigh(const WarpedMetric& m, const TestTensor& xi,
                                 double connection_scale) {
    const int n = m.grid.node_count;
    if (int(xi.profile.size()) != n)
        throw std::invalid_argument("tensor_rayleigh: profile size mismatch");
    const double dr = m.grid.dr;
    const int margin = 2; // one ghost cell plus the stencil halo
    const int lo = m.grid.index_at(xi.r_lo);
    const int hi = m.grid.index_at(xi.r_hi);
    if (lo < margin || hi > n - margin)
        throw std::invalid_argument("tensor_rayleigh: support touches the boundary");
    for (int i = 0; i < n; ++i) {
        const double r = m.grid.radius(i);
        if ((r < xi.r_lo || r > xi.r_hi) && xi.profile[size_t(i)] != 0.0)
            throw std::invalid_argument("tensor_rayleigh: profile leaks outside its support");
    }

    const int zone = sixth_order_zone(m.grid);
    const auto df = d_dr(xi.profile, Parity::Even, dr, zone);
    const auto db = d_dr(m.b, Parity::Odd, dr, zone);

    std::vector<double> grad_sq(size_t(n), 0.0), f_sq(size_t(n), 0.0), W(size_t(n), 0.0);
    for (int i = 0; i < n; ++i) {
        const double ai = m.a[size_t(i)], bi = m.b[size_t(i)];
        const double f = xi.profile[size_t(i)];
        const double fs = df[size_t(i)] / ai;
        const double bs_over_b = (db[size_t(i)] / ai) / bi;
        grad_sq[size_t(i)] =
            fs * fs + connection_scale * tensor_weight(xi.form, m.dim, bs_over_b, bi) * f * f;
        f_sq[size_t(i)] = f * f;
        W[size_t(i)] = ai * std::pow(bi, double(m.dim - 1));
    }

    // connection-term validation against the coordinate oracle
    if (m.dim == 3 || m.dim == 4) {
        const double fmax = kernels::max_abs(xi.profile.data(), size_t(n));
        int checked = 0;
        for (int i = lo + 1; i < hi - 1 && checked < 3; i += std::max(1, (hi - lo) / 4)) {
            const double f = xi.profile[size_t(i)];
            if (std::abs(f) < 0.2 * fmax) continue;
            ++checked;
            const double got = tensor_gradient_sq_oracle(m, i, f, df[size_t(i)], xi.form);
            double expected = grad_sq[size_t(i)];
            if (xi.form == TensorForm::SphereTraceless) {
                // the oracle sees the pointwise cot^2 term, not its average
                const double ai = m.a[size_t(i)], bi = m.b[size_t(i)];
                const double bs_over_b = (db[size_t(i)] / ai) / bi;
                const double fs = df[size_t(i)] / ai;
                const double cot = std::cos(oracle_theta()) / std::sin(oracle_theta());
                expected = fs * fs +
                           connection_scale *
                               (2.0 * bs_over_b * bs_over_b +
                                2.0 * double(m.dim - 1) * cot * cot / (bi * bi)) *
                               f * f;
            }
            const double scale = std::max(std::abs(got), std::abs(expected));
            if (std::abs(got - expected) > 1e-4 * std::max(scale, 1e-12))
                throw std::runtime_error(
                    "tensor_rayleigh: connection term disagrees with the coordinate oracle "
                    "(closed form " + std::to_string(expected) + ", oracle " +
                    std::to_string(got) + " at node " + std::to_string(i) + ")");
        }
    }

    std::vector<double> ones(size_t(n), 1.0);
    const double num = kernels::weighted_dot(grad_sq.data(), W.data(), ones.data(), size_t(n)) * dr;
    const double den = kernels::weighted_dot(f_sq.data(), W.data(), ones.data(), size_t(n)) * dr;
    if (den <= 0.0) throw std::domain_error("tensor_rayleigh: zero denominator");

    SpectralEstimate est;
    est.value = num / den;
    est.kind = SpectralKind::TensorRayleigh;
    est.domain_radius = m.grid.r_max;
    est.grid_spacing = dr;
    return est;
}

TestTensor make_test_tensor(const RadialGrid& grid, TensorForm form, double r_lo,
                            double r_hi, const std::function<double(double)>& shape) {
    TestTensor t;
    t.form = form;
    t.r_lo = r_lo;
    t.r_hi = r_hi;
    t.profile.assign(size_t(grid.node_count), 0.0);
    for (int i = 0; i < grid.node_count; ++i) {
        const double r = grid.radius(i);
        if (r < r_lo || r > r_hi) continue;
        t.profile[size_t(i)] = shape((r - r_lo) / (r_hi - r_lo));
    }
    return t;
}

namespace {

// cardinal cubic B-spline on [0,4]
double b3(double t) {
    if (t <= 0.0 || t >= 4.0) return 0.0;
    if (t < 1.0) return t * t * t / 6.0;
    if (t < 2.0) return (-3.0 * t * t * t + 12.0 * t * t - 12.0 * t + 4.0) / 6.0;
    if (t < 3.0) return (3.0 * t * t * t - 24.0 * t * t + 60.0 * t - 44.0) / 6.0;
    const double u = 4.0 - t;
    return u * u * u / 6.0;
}

double b3_deriv(double t) {
    if (t <= 0.0 || t >= 4.0) return 0.0;
    if (t < 1.0) return t * t / 2.0;
    if (t < 2.0) return (-9.0 * t * t + 24.0 * t - 12.0) / 6.0;
    if (t < 3.0) return (9.0 * t * t - 48.0 * t + 60.0) / 6.0;
    const double u = 4.0 - t;
    return -u * u / 2.0;
}

// basis j of `count` cubic splines strictly inside [lo, hi]
double spline_basis(double r, double lo, double hi, int count, int j, bool deriv) {
    const double h = (hi - lo) / double(count + 3);
    const double t = (r - lo) / h - double(j);
    return deriv ? b3_deriv(t) / h : b3(t);
}

// smallest generalized eigenvalue of A c = lambda B c (A, B symmetric,
// B positive definite) via Cholesky reduction and Jacobi sweeps
double smallest_gen_eig(std::vector<double> A, std::vector<double> B, int n) {
    auto at = [n](std::vector<double>& M, int i, int j) -> double& {
        return M[size_t(i * n + j)];
    };
    // B = L L^T
    std::vector<double> L(size_t(n * n), 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) {
            double s = at(B, i, j);
            for (int k = 0; k < j; ++k) s -= at(L, i, k) * at(L, j, k);
            if (i == j) {
                if (s <= 0.0) throw std::runtime_error("spline family: Gram matrix not PD");
                at(L, i, j) = std::sqrt(s);
            } else {
                at(L, i, j) = s / at(L, j, j);
            }
        }
    // C = L^{-1} A L^{-T}
    std::vector<double> C = A;
    for (int col = 0; col < n; ++col) { // forward solve L X = A (per column)
        for (int i = 0; i < n; ++i) {
            double s = at(C, i, col);
            for (int k = 0; k < i; ++k) s -= at(L, i, k) * at(C, k, col);
            at(C, i, col) = s / at(L, i, i);
        }
    }
    for (int row = 0; row < n; ++row) { // then X L^T = C (per row)
        for (int j = 0; j < n; ++j) {
            double s = at(C, row, j);
            for (int k = 0; k < j; ++k) s -= at(C, row, k) * at(L, j, k);
            at(C, row, j) = s / at(L, j, j);
        }
    }
    // Jacobi
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += at(C, p, q) * at(C, p, q);
        if (off < 1e-22) break;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                const double apq = at(C, p, q);
                if (std::abs(apq) < 1e-300) continue;
                const double theta = 0.5 * (at(C, q, q) - at(C, p, p)) / apq;
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double ckp = at(C, k, p), ckq = at(C, k, q);
                    at(C, k, p) = c * ckp - s * ckq;
                    at(C, k, q) = s * ckp + c * ckq;
                }
                for (int k = 0; k < n; ++k) {
                    const double cpk = at(C, p, k), cqk = at(C, q, k);
                    at(C, p, k) = c * cpk - s * cqk;
                    at(C, q, k) = s * cpk + c * cqk;
                }
            }
    }
    double lo = at(C, 0, 0);
    for (int i = 1; i < n; ++i) lo = std::min(lo, at(C, i, i));
    return lo;
}

} // namespace

std::vector<double> sample_tensor_quotients(const WarpedMetric& m, TensorForm form,
                                            double r_lo, double r_hi, int count,
                                            std::uint64_t seed) {
    const int coeffs = 10;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> out;
    out.reserve(size_t(count));
    for (int s = 0; s < count; ++s) {
        TestTensor t;
        t.form = form;
        t.r_lo = r_lo;
        t.r_hi = r_hi;
        t.profile.assign(size_t(m.grid.node_count), 0.0);
        std::vector<double> c(size_t(coeffs), 0.0);
        for (auto& x : c) x = u(rng);
        double amp = 0.0;
        for (int i = 0; i < m.grid.node_count; ++i) {
            const double r = m.grid.radius(i);
            if (r < r_lo || r > r_hi) continue;
            double v = 0.0;
            for (int j = 0; j < coeffs; ++j)
                v += c[size_t(j)] * spline_basis(r, r_lo, r_hi, coeffs, j, false);
            t.profile[size_t(i)] = v;
            amp = std::max(amp, std::abs(v));
        }
        if (amp < 1e-3) {
            --s; // degenerate draw
            continue;
        }
        out.push_back(tensor_rayleigh(m, t).value);
    }
    return out;
}

SpectralEstimate min_spline_quotient(const WarpedMetric& m, TensorForm form,
                                     double r_lo, double r_hi, int coeff_count) {
    const int n = m.grid.node_count;
    const double dr = m.grid.dr;
    const int zone = sixth_order_zone(m.grid);
    const auto db = d_dr(m.b, Parity::Odd, dr, zone);

    std::vector<double> A(size_t(coeff_count * coeff_count), 0.0);
    std::vector<double> B(size_t(coeff_count * coeff_count), 0.0);
    for (int i = 0; i < n; ++i) {
        const double r = m.grid.radius(i);
        if (r < r_lo || r > r_hi) continue;
        const double ai = m.a[size_t(i)], bi = m.b[size_t(i)];
        const double W = ai * std::pow(bi, double(m.dim - 1)) * dr;
        const double bs_over_b = (db[size_t(i)] / ai) / bi;
        const double wt = tensor_weight(form, m.dim, bs_over_b, bi);
        for (int j = 0; j < coeff_count; ++j) {
            const double vj = spline_basis(r, r_lo, r_hi, coeff_count, j, false);
            const double dj = spline_basis(r, r_lo, r_hi, coeff_count, j, true) / ai;
            for (int k = j; k < coeff_count; ++k) {
                const double vk = spline_basis(r, r_lo, r_hi, coeff_count, k, false);
                const double dk = spline_basis(r, r_lo, r_hi, coeff_count, k, true) / ai;
                A[size_t(j * coeff_count + k)] += (dj * dk + wt * vj * vk) * W;
                B[size_t(j * coeff_count + k)] += vj * vk * W;
            }
        }
    }
    for (int j = 0; j < coeff_count; ++j)
        for (int k = 0; k < j; ++k) {
            A[size_t(j * coeff_count + k)] = A[size_t(k * coeff_count + j)];
            B[size_t(j * coeff_count + k)] = B[size_t(k * coeff_count + j)];
        }

    SpectralEstimate est;
    est.value = smallest_gen_eig(A, B, coeff_count);
    est.kind = SpectralKind::TensorRayleigh;
    est.domain_radius = m.grid.r_max;
    est.grid_spacing = dr;
    return est;
}

ComparisonProbe comparison_margin(int n, double eps, double r) {
    if (!(r > 0.0)) throw std::invalid_argument("comparison_margin: r must be positive");
    if (eps < 0.0 || eps >= 1.0)
        throw std::invalid_argument("comparison_margin: eps must lie in [0, 1)");
    auto coth = [](double x) { return std::cosh(x) / std::sinh(x); };
    const double m3 = double(n - 3);
    const double sp = std::sqrt(1.0 + eps);
    const double sm = std::sqrt(1.0 - eps);
    ComparisonProbe p;
    p.n = n;
    p.eps = eps;
    p.r = r;
    p.margin = -m3 * m3 / 4.0 - m3 * sp * coth(sp * r) +
               (m3 * double(n - 1) / 2.0) * sm * coth(sm * r);
    return p;
}

double find_epsilon0(int n, double delta, double r_max_scan, int scan_points) {
    if (!(delta > 0.0)) throw std::invalid_argument("find_epsilon0: delta must be positive");
    std::vector<double> rs(size_t(scan_points), 0.0);
    const double lr0 = std::log(1.0), lr1 = std::log(r_max_scan);
    for (int i = 0; i < scan_points; ++i)
        rs[size_t(i)] = std::exp(lr0 + (lr1 - lr0) * double(i) / double(scan_points - 1));

    const double target = double(n - 3) * double(n - 3) / 4.0 - delta;
    auto passes = [&](double eps) {
        for (double r : rs)
            if (comparison_margin(n, eps, r).margin < target) return false;
        return true;
    };

    if (!passes(0.0))
        throw std::runtime_error("find_epsilon0: predicate fails at eps = 0; "
                                 "the margin formula must be wrong");
    double lo = 0.0, hi = 0.999;
    if (passes(hi)) return hi;
    while (hi - lo > 1e-6) {
        const double mid = 0.5 * (lo + hi);
        (passes(mid) ? lo : hi) = mid;
    }
    return lo;
}

} // namespace nrf
