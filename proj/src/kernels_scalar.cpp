#include "nrf/kernels.hpp"

// Reference implementations. These define the numerical contract; the SIMD
// variants must reproduce elementwise results bit-for-bit.

namespace nrf::kernels {
namespace {

void s_axpy(const double* x, const double* k, double c, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + c * k[i];
}

void s_rk4_combine(const double* x, const double* k1, const double* k2,
                   const double* k3, const double* k4,
                   double c1, double c2, double c3, double c4,
                   double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        y[i] = x[i] + (c1 * k1[i] + c2 * k2[i]) + (c3 * k3[i] + c4 * k4[i]);
}

void s_conv5(const double* f, const double* w, double* out, std::size_t i0, std::size_t i1) {
    for (std::size_t i = i0; i < i1; ++i) {
        const double* p = f + i - 2;
        out[i] = (w[0] * p[0] + w[1] * p[1]) + w[2] * p[2] + (w[3] * p[3] + w[4] * p[4]);
    }
}

void s_conv7(const double* f, const double* w, double* out, std::size_t i0, std::size_t i1) {
    for (std::size_t i = i0; i < i1; ++i) {
        const double* p = f + i - 3;
        out[i] = ((w[0] * p[0] + w[1] * p[1]) + (w[2] * p[2] + w[3] * p[3]))
               + ((w[4] * p[4] + w[5] * p[5]) + w[6] * p[6]);
    }
}

double s_min_value(const double* x, std::size_t n) {
    double m = x[0];
    for (std::size_t i = 1; i < n; ++i) m = x[i] < m ? x[i] : m;
    return m;
}

double s_max_abs(const double* x, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double v = x[i] < 0 ? -x[i] : x[i];
        m = v > m ? v : m;
    }
    return m;
}

double s_max_abs_diff(const double* x, const double* y, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double v = x[i] - y[i];
        v = v < 0 ? -v : v;
        m = v > m ? v : m;
    }
    return m;
}

double s_weighted_dot(const double* x, const double* y, const double* w, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i] * w[i];
    return s;
}

void s_curvature_core(const double* a, const double* b, const double* da,
                      const double* db, const double* d2b,
                      double* k_rad, double* k_sph, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        double ai = a[i], bi = b[i];
        double a2 = ai * ai;
        double bs = db[i] / ai;
        double bss = d2b[i] / a2 - (db[i] * da[i]) / (a2 * ai);
        k_rad[i] = -bss / bi;
        k_sph[i] = (1.0 - bs * bs) / (bi * bi);
    }
}

void s_flow_rhs(const double* a, const double* b, const double* k_rad,
                const double* k_sph, int dim, double* da_dt, double* db_dt,
                std::size_t n) {
    const double nm1 = double(dim - 1);
    const double nm2 = double(dim - 2);
    for (std::size_t i = 0; i < n; ++i) {
        double h_rad = nm1 * (k_rad[i] + 1.0);
        double h_tan = k_rad[i] + nm2 * k_sph[i] + nm1;
        da_dt[i] = -a[i] * h_rad;
        db_dt[i] = -b[i] * h_tan;
    }
}

} // namespace

const Ops& scalar_ops() {
    static const Ops ops{
        s_axpy, s_rk4_combine, s_conv5, s_conv7, s_min_value, s_max_abs,
        s_max_abs_diff, s_weighted_dot, s_curvature_core, s_flow_rhs,
    };
    return ops;
}

} // namespace nrf::kernels
