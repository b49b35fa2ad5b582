#include "nrf/integrals.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace nrf {

void gauss_legendre(int order, double lo, double hi, std::vector<double>& x,
                    std::vector<double>& w) {
    if (order < 2) throw std::invalid_argument("gauss_legendre: order must be >= 2");
    x.resize(size_t(order));
    w.resize(size_t(order));
    const double xm = 0.5 * (hi + lo), xl = 0.5 * (hi - lo);
    const int m = (order + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(M_PI * (double(i) + 0.75) / (double(order) + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < order; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - double(j) * p2) / double(j + 1);
            }
            pp = double(order) * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        x[size_t(i)] = xm - xl * z;
        x[size_t(order - 1 - i)] = xm + xl * z;
        w[size_t(i)] = 2.0 * xl / ((1.0 - z * z) * pp * pp);
        w[size_t(order - 1 - i)] = w[size_t(i)];
    }
}

double sphere_volume(int k) {
    return 2.0 * std::pow(M_PI, 0.5 * (k + 1)) / std::tgamma(0.5 * (k + 1));
}

namespace {

// log sinh s, stable for large s
double log_sinh(double s) {
    if (s > 20.0) return s - M_LN2 + std::log1p(-std::exp(-2.0 * s));
    return std::log(std::sinh(s));
}

// Simpson weights over [lo, hi] with an even interval count, appended to
// (node, weight) lists.
void simpson_nodes(double lo, double hi, int intervals, std::vector<double>& x,
                   std::vector<double>& w) {
    intervals = std::max(2, intervals + (intervals % 2));
    const double h = (hi - lo) / intervals;
    for (int i = 0; i <= intervals; ++i) {
        double wt = (i == 0 || i == intervals) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        x.push_back(lo + i * h);
        w.push_back(wt * h / 3.0);
    }
}

} // namespace

ConvolutionResult convolution_integral(const ConvolutionQuery& q) {
    if (q.n < 2) throw std::invalid_argument("convolution_integral: n must be >= 2");
    if (q.D < 0.0) throw std::invalid_argument("convolution_integral: D must be >= 0");
    const double a = q.a_exp, b = q.b_exp;
    const double decay = a + b - double(q.n - 1);

    ConvolutionResult res;
    if (decay <= 0.0) {
        res.divergent = true;
        res.value = std::numeric_limits<double>::infinity();
        return res;
    }

    const double S = (q.s_max > 0.0) ? q.s_max : 40.0 + q.D;
    const double omega = sphere_volume(q.n - 2);

    // split the radial rule at s = D, where d(y,z) has a conical kink
    std::vector<double> sx, sw;
    if (q.D > 1e-12 && q.D < S) {
        const int n1 = std::max(16, int(double(q.radial_nodes) * q.D / S));
        simpson_nodes(0.0, q.D, n1, sx, sw);
        simpson_nodes(q.D, S, std::max(16, q.radial_nodes - n1), sx, sw);
    } else {
        simpson_nodes(0.0, S, q.radial_nodes, sx, sw);
    }

    std::vector<double> tx, tw;
    gauss_legendre(q.angular_nodes, 0.0, M_PI, tx, tw);

    const double coshD = std::cosh(q.D), sinhD = std::sinh(q.D);
    double total = 0.0;
    for (size_t is = 0; is < sx.size(); ++is) {
        const double s = sx[is];
        if (s <= 0.0) continue; // sinh^{n-1} s vanishes
        const double log_radial = -a * s + double(q.n - 1) * log_sinh(s);
        const double cs = std::cosh(s), ss = std::sinh(s);
        double ang = 0.0;
        for (size_t it = 0; it < tx.size(); ++it) {
            const double u = std::max(1.0, coshD * cs - sinhD * ss * std::cos(tx[it]));
            const double d = std::acosh(u);
            ang += tw[it] * std::pow(std::sin(tx[it]), double(q.n - 2)) * std::exp(-b * d);
        }
        total += sw[is] * ang * std::exp(log_radial);
    }
    res.value = omega * total;

    // sinh^{n-1} s <= e^{(n-1)s}/2^{n-1} and e^{-b d} <= e^{|b| D} e^{-b s}
    const double sin_int = std::sqrt(M_PI) * std::tgamma(0.5 * (q.n - 1)) /
                           std::tgamma(0.5 * q.n);
    res.tail_bound = omega * sin_int * std::exp(std::abs(b) * q.D) *
                     std::exp(-decay * S) / (decay * std::pow(2.0, double(q.n - 1)));
    return res;
}

RatioCurve convolution_ratio_curve(int n, double a_exp, double b_exp,
                                   const std::vector<double>& D_list,
                                   int radial_nodes, int angular_nodes) {
    if (D_list.size() < 2)
        throw std::invalid_argument("convolution_ratio_curve: need at least 2 distances");
    RatioCurve c;
    c.hypothesis_ok = (a_exp + b_exp > double(n - 1)) && (a_exp > b_exp);
    for (double D : D_list) {
        ConvolutionQuery q;
        q.n = n;
        q.a_exp = a_exp;
        q.b_exp = b_exp;
        q.D = D;
        q.radial_nodes = radial_nodes;
        q.angular_nodes = angular_nodes;
        const auto r = convolution_integral(q);
        if (r.divergent)
            throw std::domain_error("convolution_ratio_curve: divergent parameters");
        c.D.push_back(D);
        c.integral.push_back(r.value);
        c.ratio.push_back(r.value * std::exp(b_exp * D));
    }
    for (double v : c.ratio) c.empirical_C = std::max(c.empirical_C, v);

    // least-squares slope of log(ratio) on the final third
    const double d_lo = c.D.front() + 2.0 / 3.0 * (c.D.back() - c.D.front());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int k = 0;
    for (size_t i = 0; i < c.D.size(); ++i) {
        if (c.D[i] < d_lo) continue;
        const double y = std::log(c.ratio[i]);
        sx += c.D[i];
        sy += y;
        sxx += c.D[i] * c.D[i];
        sxy += c.D[i] * y;
        ++k;
    }
    if (k >= 2) c.tail_slope = (double(k) * sxy - sx * sy) / (double(k) * sxx - sx * sx);
    return c;
}

} // namespace nrf
