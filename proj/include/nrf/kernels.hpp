#pragma once
#include <cstddef>

// Hot inner loops of the radial solver. Every kernel has a scalar reference
// implementation and (on x86_64) an AVX2 variant; the backend is chosen once
// at startup from CPUID and can be overridden for equivalence testing.
//
// Elementwise kernels are bit-identical across backends (same operation
// order, no FMA contraction). Reductions may differ in association and are
// compared with a small tolerance in tests.

namespace nrf::kernels {

enum class Backend { Scalar, Avx2 };

Backend active_backend();
void set_backend(Backend b);   // throws if the backend is unavailable
bool avx2_available();
const char* backend_name(Backend b);

// y[i] = x[i] + c * k[i]
void axpy(const double* x, const double* k, double c, double* y, std::size_t n);

// y[i] = x[i] + c1*k1[i] + c2*k2[i] + c3*k3[i] + c4*k4[i]
void rk4_combine(const double* x,
                 const double* k1, const double* k2,
                 const double* k3, const double* k4,
                 double c1, double c2, double c3, double c4,
                 double* y, std::size_t n);

// 5- and 7-tap centered convolutions: out[i] = sum_j w[j] * f[i + j - taps/2]
// applied for i in [i0, i1). Callers handle boundary rows themselves.
void conv5(const double* f, const double* w, double* out, std::size_t i0, std::size_t i1);
void conv7(const double* f, const double* w, double* out, std::size_t i0, std::size_t i1);

double min_value(const double* x, std::size_t n);
double max_abs(const double* x, std::size_t n);
double max_abs_diff(const double* x, const double* y, std::size_t n);

// sum_i x[i] * y[i] * w[i]
double weighted_dot(const double* x, const double* y, const double* w, std::size_t n);

// Sectional curvatures of the warped metric from precomputed radial
// derivatives: b_s = db/a, b_ss = d2b/a^2 - db*da/a^3,
// k_rad = -b_ss/b, k_sph = (1 - b_s^2)/b^2.
void curvature_core(const double* a, const double* b,
                    const double* da, const double* db, const double* d2b,
                    double* k_rad, double* k_sph, std::size_t n);

// Normalized Ricci flow right-hand side from the curvature fields:
// da_dt = -a*(n-1)*(k_rad+1), db_dt = -b*(k_rad + (n-2)*k_sph + (n-1)).
void flow_rhs(const double* a, const double* b,
              const double* k_rad, const double* k_sph, int dim,
              double* da_dt, double* db_dt, std::size_t n);

// Function-pointer table a backend fills in.
struct Ops {
    void (*axpy)(const double*, const double*, double, double*, std::size_t);
    void (*rk4_combine)(const double*, const double*, const double*, const double*,
                        const double*, double, double, double, double, double*, std::size_t);
    void (*conv5)(const double*, const double*, double*, std::size_t, std::size_t);
    void (*conv7)(const double*, const double*, double*, std::size_t, std::size_t);
    double (*min_value)(const double*, std::size_t);
    double (*max_abs)(const double*, std::size_t);
    double (*max_abs_diff)(const double*, const double*, std::size_t);
    double (*weighted_dot)(const double*, const double*, const double*, std::size_t);
    void (*curvature_core)(const double*, const double*, const double*, const double*,
                           const double*, double*, double*, std::size_t);
    void (*flow_rhs)(const double*, const double*, const double*, const double*, int,
                     double*, double*, std::size_t);
};

const Ops& scalar_ops();
#ifdef NRF_X86
const Ops& avx2_ops();
#endif

} // namespace nrf::kernels
