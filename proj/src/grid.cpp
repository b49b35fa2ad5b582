#include "nrf/grid.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "nrf/kernels.hpp"

namespace nrf {

RadialGrid RadialGrid::with_count(int node_count, double dr) {
    if (node_count < 16) throw std::invalid_argument("RadialGrid: node_count must be >= 16");
    if (!(dr > 0.0)) throw std::invalid_argument("RadialGrid: dr must be positive");
    RadialGrid g;
    g.node_count = node_count;
    g.dr = dr;
    g.r_max = node_count * dr;
    g.nodes.resize(size_t(node_count));
    for (int i = 0; i < node_count; ++i) g.nodes[size_t(i)] = (i + 0.5) * dr;
    return g;
}

RadialGrid RadialGrid::with_extent(double r_max, int node_count) {
    if (node_count < 16) throw std::invalid_argument("RadialGrid: node_count must be >= 16");
    if (!(r_max > 0.0)) throw std::invalid_argument("RadialGrid: r_max must be positive");
    return with_count(node_count, r_max / node_count);
}

int RadialGrid::index_at(double r) const {
    auto it = std::lower_bound(nodes.begin(), nodes.end(), r);
    return int(it - nodes.begin());
}

std::vector<double> fd_weights(double x0, const std::vector<double>& nodes, int m) {
    // Fornberg, "Generation of finite difference formulas on arbitrarily
    // spaced grids", Math. Comp. 51 (1988).
    const int n = int(nodes.size()) - 1;
    std::vector<std::vector<double>> c(size_t(n + 1), std::vector<double>(size_t(m + 1), 0.0));
    double c1 = 1.0;
    double c4 = nodes[0] - x0;
    c[0][0] = 1.0;
    for (int i = 1; i <= n; ++i) {
        const int mn = std::min(i, m);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = nodes[size_t(i)] - x0;
        for (int j = 0; j < i; ++j) {
            const double c3 = nodes[size_t(i)] - nodes[size_t(j)];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    c[size_t(i)][size_t(k)] =
                        c1 * (k * c[size_t(i - 1)][size_t(k - 1)] - c5 * c[size_t(i - 1)][size_t(k)]) / c2;
                c[size_t(i)][0] = -c1 * c5 * c[size_t(i - 1)][0] / c2;
            }
            for (int k = mn; k >= 1; --k)
                c[size_t(j)][size_t(k)] =
                    (c4 * c[size_t(j)][size_t(k)] - k * c[size_t(j)][size_t(k - 1)]) / c3;
            c[size_t(j)][0] = c4 * c[size_t(j)][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(nodes.size());
    for (size_t i = 0; i < nodes.size(); ++i) w[i] = c[i][size_t(m)];
    return w;
}

namespace {

struct StencilTables {
    std::array<double, 5> c5_d1{}, c5_d2{};
    std::array<double, 7> c7_d1{}, c7_d2{};
    // one-sided rows: node N-2 uses offsets {-3..+1} (d1) / {-4..+1} (d2),
    // node N-1 uses {-4..0} / {-5..0}; all 4th order
    std::array<double, 5> e1_d1{}, e0_d1{};
    std::array<double, 6> e1_d2{}, e0_d2{};

    StencilTables() {
        auto fill = [](auto& dst, double x0, std::vector<double> xs, int m) {
            auto w = fd_weights(x0, xs, m);
            std::copy(w.begin(), w.end(), dst.begin());
        };
        fill(c5_d1, 0.0, {-2, -1, 0, 1, 2}, 1);
        fill(c5_d2, 0.0, {-2, -1, 0, 1, 2}, 2);
        fill(c7_d1, 0.0, {-3, -2, -1, 0, 1, 2, 3}, 1);
        fill(c7_d2, 0.0, {-3, -2, -1, 0, 1, 2, 3}, 2);
        fill(e1_d1, 0.0, {-3, -2, -1, 0, 1}, 1);
        fill(e1_d2, 0.0, {-4, -3, -2, -1, 0, 1}, 2);
        fill(e0_d1, 0.0, {-4, -3, -2, -1, 0}, 1);
        fill(e0_d2, 0.0, {-5, -4, -3, -2, -1, 0}, 2);
    }
};

const StencilTables& tables() {
    static const StencilTables t;
    return t;
}

std::vector<double> apply(const std::vector<double>& f, Parity p, double dr,
                          int sixth_until, int order) {
    const int n = int(f.size());
    if (n < 8) throw std::invalid_argument("d_dr: field too short");
    const double sign = (p == Parity::Even) ? 1.0 : -1.0;

    // three parity ghost cells on the origin side
    std::vector<double> ext(size_t(n) + 3);
    ext[0] = sign * f[2];
    ext[1] = sign * f[1];
    ext[2] = sign * f[0];
    std::copy(f.begin(), f.end(), ext.begin() + 3);

    const auto& t = tables();
    const double* w5 = (order == 1 ? t.c5_d1.data() : t.c5_d2.data());
    const double* w7 = (order == 1 ? t.c7_d1.data() : t.c7_d2.data());

    std::vector<double> out(static_cast<size_t>(n), 0.0);
    const double* base = ext.data() + 3;
    const int i7_end = std::clamp(sixth_until, 0, n - 3);
    if (i7_end > 0) kernels::conv7(base, w7, out.data(), 0, size_t(i7_end));
    if (i7_end < n - 2) kernels::conv5(base, w5, out.data(), size_t(i7_end), size_t(n - 2));

    if (order == 1) {
        double s = 0.0;
        for (int j = 0; j < 5; ++j) s += t.e1_d1[size_t(j)] * f[size_t(n - 5 + j)];
        out[size_t(n - 2)] = s;
        s = 0.0;
        for (int j = 0; j < 5; ++j) s += t.e0_d1[size_t(j)] * f[size_t(n - 5 + j)];
        out[size_t(n - 1)] = s;
    } else {
        double s = 0.0;
        for (int j = 0; j < 6; ++j) s += t.e1_d2[size_t(j)] * f[size_t(n - 6 + j)];
        out[size_t(n - 2)] = s;
        s = 0.0;
        for (int j = 0; j < 6; ++j) s += t.e0_d2[size_t(j)] * f[size_t(n - 6 + j)];
        out[size_t(n - 1)] = s;
    }

    const double scale = (order == 1) ? 1.0 / dr : 1.0 / (dr * dr);
    for (auto& v : out) v *= scale;
    return out;
}

} // namespace

std::vector<double> d_dr(const std::vector<double>& f, Parity p, double dr,
                         int sixth_order_until) {
    return apply(f, p, dr, sixth_order_until, 1);
}

std::vector<double> d2_dr2(const std::vector<double>& f, Parity p, double dr,
                           int sixth_order_until) {
    return apply(f, p, dr, sixth_order_until, 2);
}

std::vector<double> arclength(const std::vector<double>& a, double dr) {
    std::vector<double> s(a.size());
    double acc = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        s[i] = acc + 0.5 * dr * a[i];
        acc += dr * a[i];
    }
    return s;
}

double integrate(const std::vector<double>& f, double dr) {
    double s = 0.0;
    for (double v : f) s += v;
    return s * dr;
}

} // namespace nrf
