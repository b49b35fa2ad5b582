#include "nrf/oracle.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace nrf {

namespace {

constexpr double kTheta0 = 1.0;
constexpr double kPhi0 = 1.1;
constexpr double kAngStep = 0.25;

// Centered differences normalized to be exact on {1, sin 2x, cos 2x}; every
// angular factor of the metric lies in that class. A plain h^2 normalization
// would leak an O(h^2) breach of the csc^2 - cot^2 = 1 cancellation into the
// first cells, where division by b^2 ~ r^2 amplifies it to O(1).
template <class F>
double dtheta1(F f, double x) {
    const double h = kAngStep;
    return (f(x + h) - f(x - h)) / std::sin(2.0 * h);
}
template <class F>
double dtheta2(F f, double x) {
    const double h = kAngStep;
    return (f(x + h) - 2.0 * f(x) + f(x - h)) * 2.0 / (1.0 - std::cos(2.0 * h));
}

struct AngularTables {
    // per component c: value, d/dtheta, d/dphi, d2/dtheta2, d2/dphi2, d2/dthetadphi
    std::array<double, 4> val{}, dth{}, dph{}, dthth{}, dphph{}, dthph{};
};

// угловой factor of each diagonal component: {1, 1, sin^2 th, sin^2 th sin^2 ph}
double ang_factor(int c, double th, double ph) {
    switch (c) {
    case 0:
    case 1: return 1.0;
    case 2: return std::sin(th) * std::sin(th);
    default: {
        const double s = std::sin(th) * std::sin(ph);
        return s * s; // sin^2 th sin^2 ph
    }
    }
}

AngularTables angular_tables(int dim) {
    AngularTables t;
    for (int c = 0; c < dim; ++c) {
        auto f_th = [c](double th) { return ang_factor(c, th, kPhi0); };
        auto f_ph = [c](double ph) { return ang_factor(c, kTheta0, ph); };
        t.val[size_t(c)] = ang_factor(c, kTheta0, kPhi0);
        t.dth[size_t(c)] = dtheta1(f_th, kTheta0);
        t.dph[size_t(c)] = dtheta1(f_ph, kPhi0);
        t.dthth[size_t(c)] = dtheta2(f_th, kTheta0);
        t.dphph[size_t(c)] = dtheta2(f_ph, kPhi0);
        auto f_mixed = [c](double th) {
            auto g = [c, th](double ph) { return ang_factor(c, th, ph); };
            return dtheta1(g, kPhi0);
        };
        t.dthph[size_t(c)] = dtheta1(f_mixed, kTheta0);
    }
    return t;
}

// Everything the tensor algebra needs at one node: diagonal metric, its
// first and second coordinate derivatives, and the Christoffel symbols.
struct NodeChart {
    int dim;
    std::array<double, 4> g{}, ginv{};
    std::array<std::array<double, 4>, 4> dg{};                 // dg[m][c]
    std::array<std::array<std::array<double, 4>, 4>, 4> d2g{}; // d2g[m][l][c]
    std::array<std::array<std::array<double, 4>, 4>, 4> gamma{}; // gamma[k][i][j]
};

struct OracleFields {
    std::vector<double> A, B, dA, dB, d2A, d2B;
    AngularTables ang;
    int dim;
};

OracleFields prepare(const WarpedMetric& m) {
    OracleFields f;
    f.dim = m.dim;
    const int n = m.grid.node_count;
    f.A.resize(size_t(n));
    f.B.resize(size_t(n));
    for (int i = 0; i < n; ++i) {
        f.A[size_t(i)] = m.a[size_t(i)] * m.a[size_t(i)];
        f.B[size_t(i)] = m.b[size_t(i)] * m.b[size_t(i)];
    }
    // validator stencils: wide only on the first two cells
    const int zone = 2;
    f.dA = d_dr(f.A, Parity::Even, m.grid.dr, zone);
    f.dB = d_dr(f.B, Parity::Even, m.grid.dr, zone);
    f.d2A = d2_dr2(f.A, Parity::Even, m.grid.dr, zone);
    f.d2B = d2_dr2(f.B, Parity::Even, m.grid.dr, zone);
    f.ang = angular_tables(m.dim);
    return f;
}

NodeChart chart_at(const OracleFields& f, int i) {
    NodeChart c;
    c.dim = f.dim;
    const auto& t = f.ang;
    for (int cc = 0; cc < f.dim; ++cc) {
        const double rad = (cc == 0) ? f.A[size_t(i)] : f.B[size_t(i)];
        const double drad = (cc == 0) ? f.dA[size_t(i)] : f.dB[size_t(i)];
        const double d2rad = (cc == 0) ? f.d2A[size_t(i)] : f.d2B[size_t(i)];
        c.g[size_t(cc)] = rad * t.val[size_t(cc)];
        c.ginv[size_t(cc)] = 1.0 / c.g[size_t(cc)];
        // first derivatives: order r, theta, phi, psi (nothing depends on psi)
        c.dg[0][size_t(cc)] = drad * t.val[size_t(cc)];
        c.dg[1][size_t(cc)] = rad * t.dth[size_t(cc)];
        c.dg[2][size_t(cc)] = rad * t.dph[size_t(cc)];
        c.d2g[0][0][size_t(cc)] = d2rad * t.val[size_t(cc)];
        c.d2g[0][1][size_t(cc)] = c.d2g[1][0][size_t(cc)] = drad * t.dth[size_t(cc)];
        c.d2g[0][2][size_t(cc)] = c.d2g[2][0][size_t(cc)] = drad * t.dph[size_t(cc)];
        c.d2g[1][1][size_t(cc)] = rad * t.dthth[size_t(cc)];
        c.d2g[2][2][size_t(cc)] = rad * t.dphph[size_t(cc)];
        c.d2g[1][2][size_t(cc)] = c.d2g[2][1][size_t(cc)] = rad * t.dthph[size_t(cc)];
    }
    for (int k = 0; k < f.dim; ++k)
        for (int i2 = 0; i2 < f.dim; ++i2)
            for (int j = 0; j < f.dim; ++j) {
                const double dig_jk = (j == k) ? c.dg[size_t(i2)][size_t(j)] : 0.0;
                const double djg_ik = (i2 == k) ? c.dg[size_t(j)][size_t(i2)] : 0.0;
                const double dkg_ij = (i2 == j) ? c.dg[size_t(k)][size_t(i2)] : 0.0;
                c.gamma[size_t(k)][size_t(i2)][size_t(j)] =
                    0.5 * c.ginv[size_t(k)] * (dig_jk + djg_ik - dkg_ij);
            }
    return c;
}

// Lowered Riemann tensor from second derivatives of the metric plus
// quadratic Christoffel terms; sign fixed so the unit round sphere gives
// K = +1 and the hyperbolic metric K = -1 (checked in tests).
double riemann(const NodeChart& c, int i, int k, int l, int m) {
    auto dd = [&](int p, int q, int comp_row, int comp_col) -> double {
        return (comp_row == comp_col) ? c.d2g[size_t(p)][size_t(q)][size_t(comp_row)] : 0.0;
    };
    double r = 0.5 * (dd(k, l, i, m) + dd(i, m, k, l) - dd(k, m, i, l) - dd(i, l, k, m));
    for (int n2 = 0; n2 < c.dim; ++n2) {
        r += c.g[size_t(n2)] * (c.gamma[size_t(n2)][size_t(k)][size_t(l)] *
                                    c.gamma[size_t(n2)][size_t(i)][size_t(m)] -
                                c.gamma[size_t(n2)][size_t(k)][size_t(m)] *
                                    c.gamma[size_t(n2)][size_t(i)][size_t(l)]);
    }
    return r;
}

double ricci_diag(const NodeChart& c, int j) {
    double s = 0.0;
    for (int i = 0; i < c.dim; ++i) {
        if (i == j) continue;
        s += c.ginv[size_t(i)] * riemann(c, i, j, i, j);
    }
    return s;
}

} // namespace

double oracle_theta() { return kTheta0; }

CurvatureField curvature_oracle(const WarpedMetric& m) {
    if (m.dim != 3 && m.dim != 4)
        throw std::invalid_argument("curvature_oracle: only n in {3,4} has an explicit chart");
    const int n = m.grid.node_count;
    if (n < 16) throw std::invalid_argument("curvature_oracle: grid too coarse");

    const OracleFields f = prepare(m);
    CurvatureField out;
    const double nm1 = double(m.dim - 1);
    const double nm2 = double(m.dim - 2);
    out.k_rad.resize(size_t(n));
    out.k_sph.resize(size_t(n));
    out.ric_rad.resize(size_t(n));
    out.ric_tan.resize(size_t(n));
    out.h_rad.resize(size_t(n));
    out.h_tan.resize(size_t(n));
    out.h_norm.resize(size_t(n));
    out.q_norm.resize(size_t(n));

    for (int i = 0; i < n; ++i) {
        const NodeChart c = chart_at(f, i);
        const double krad = riemann(c, 0, 1, 0, 1) * c.ginv[0] * c.ginv[1];
        const double ksph = riemann(c, 1, 2, 1, 2) * c.ginv[1] * c.ginv[2];
        const double ric_r = ricci_diag(c, 0) * c.ginv[0];
        const double ric_t = ricci_diag(c, 1) * c.ginv[1];
        out.k_rad[size_t(i)] = krad;
        out.k_sph[size_t(i)] = ksph;
        out.ric_rad[size_t(i)] = ric_r;
        out.ric_tan[size_t(i)] = ric_t;
        out.h_rad[size_t(i)] = ric_r + nm1;
        out.h_tan[size_t(i)] = ric_t + nm1;
        out.h_norm[size_t(i)] = std::sqrt(out.h_rad[size_t(i)] * out.h_rad[size_t(i)] +
                                          nm1 * out.h_tan[size_t(i)] * out.h_tan[size_t(i)]);
        const double qr = krad + 1.0;
        const double qs = ksph + 1.0;
        out.q_norm[size_t(i)] = std::sqrt(4.0 * nm1 * qr * qr + 2.0 * nm1 * nm2 * qs * qs);
    }
    return out;
}

double tensor_gradient_sq_oracle(const WarpedMetric& m, int node, double f,
                                 double df_dr, TensorForm form) {
    if (m.dim != 3 && m.dim != 4)
        throw std::invalid_argument("tensor_gradient_sq_oracle: only n in {3,4}");
    const OracleFields fields = prepare(m);
    const NodeChart c = chart_at(fields, node);
    const int dim = m.dim;
    const auto& t = fields.ang;

    // frame eigenvalues of the unit traceless direction
    std::array<double, 4> tau{};
    if (form == TensorForm::RadialTraceless) {
        const double norm = std::sqrt(double(dim) * double(dim - 1));
        tau[0] = double(dim - 1) / norm;
        for (int j = 1; j < dim; ++j) tau[size_t(j)] = -1.0 / norm;
    } else {
        const double md = double(dim - 1); // sphere dimension
        const double norm = std::sqrt(md * (md - 1.0));
        tau[0] = 0.0;
        tau[1] = (md - 1.0) / norm;
        for (int j = 2; j < dim; ++j) tau[size_t(j)] = -1.0 / norm;
    }

    // coordinate components xi_cc = f * tau_c * g_cc and their derivatives;
    // the radial factor of g_cc is A or B, the angular factor is shared.
    std::array<double, 4> xi{}, rad{}, drad{};
    for (int cc = 0; cc < dim; ++cc) {
        rad[size_t(cc)] = (cc == 0) ? fields.A[size_t(node)] : fields.B[size_t(node)];
        drad[size_t(cc)] = (cc == 0) ? fields.dA[size_t(node)] : fields.dB[size_t(node)];
        xi[size_t(cc)] = f * tau[size_t(cc)] * c.g[size_t(cc)];
    }
    auto dxi = [&](int k, int cc) -> double {
        if (k == 0)
            return tau[size_t(cc)] *
                   (df_dr * rad[size_t(cc)] * t.val[size_t(cc)] +
                    f * drad[size_t(cc)] * t.val[size_t(cc)]);
        if (k == 1) return tau[size_t(cc)] * f * rad[size_t(cc)] * t.dth[size_t(cc)];
        if (k == 2) return tau[size_t(cc)] * f * rad[size_t(cc)] * t.dph[size_t(cc)];
        return 0.0;
    };

    double total = 0.0;
    for (int k = 0; k < dim; ++k)
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) {
                double cov = (i == j) ? dxi(k, i) : 0.0;
                // - Gamma^l_{ki} xi_{lj} - Gamma^l_{kj} xi_{il}
                cov -= c.gamma[size_t(j)][size_t(k)][size_t(i)] * xi[size_t(j)];
                cov -= c.gamma[size_t(i)][size_t(k)][size_t(j)] * xi[size_t(i)];
                total += c.ginv[size_t(k)] * c.ginv[size_t(i)] * c.ginv[size_t(j)] * cov * cov;
            }
    return total;
}

} // namespace nrf
