#include "nrf/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>

namespace nrf::kernels {

namespace {

bool detect_avx2() {
#ifdef NRF_X86
    if (const char* e = std::getenv("NRF_FORCE_SCALAR"); e && e[0] != '\0' && e[0] != '0')
        return false;
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

std::atomic<Backend>& backend_slot() {
    static std::atomic<Backend> slot{detect_avx2() ? Backend::Avx2 : Backend::Scalar};
    return slot;
}

const Ops& ops_for(Backend b) {
#ifdef NRF_X86
    if (b == Backend::Avx2) return avx2_ops();
#endif
    return scalar_ops();
}

} // namespace

bool avx2_available() {
#ifdef NRF_X86
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

Backend active_backend() { return backend_slot().load(std::memory_order_relaxed); }

void set_backend(Backend b) {
    if (b == Backend::Avx2 && !avx2_available())
        throw std::runtime_error("kernels: AVX2 backend requested but not available");
    backend_slot().store(b, std::memory_order_relaxed);
}

const char* backend_name(Backend b) {
    return b == Backend::Avx2 ? "avx2" : "scalar";
}

void axpy(const double* x, const double* k, double c, double* y, std::size_t n) {
    ops_for(active_backend()).axpy(x, k, c, y, n);
}

void rk4_combine(const double* x, const double* k1, const double* k2,
                 const double* k3, const double* k4,
                 double c1, double c2, double c3, double c4,
                 double* y, std::size_t n) {
    ops_for(active_backend()).rk4_combine(x, k1, k2, k3, k4, c1, c2, c3, c4, y, n);
}

void conv5(const double* f, const double* w, double* out, std::size_t i0, std::size_t i1) {
    ops_for(active_backend()).conv5(f, w, out, i0, i1);
}

void conv7(const double* f, const double* w, double* out, std::size_t i0, std::size_t i1) {
    ops_for(active_backend()).conv7(f, w, out, i0, i1);
}

double min_value(const double* x, std::size_t n) {
    return ops_for(active_backend()).min_value(x, n);
}

double max_abs(const double* x, std::size_t n) {
    return ops_for(active_backend()).max_abs(x, n);
}

double max_abs_diff(const double* x, const double* y, std::size_t n) {
    return ops_for(active_backend()).max_abs_diff(x, y, n);
}

double weighted_dot(const double* x, const double* y, const double* w, std::size_t n) {
    return ops_for(active_backend()).weighted_dot(x, y, w, n);
}

void curvature_core(const double* a, const double* b, const double* da,
                    const double* db, const double* d2b,
                    double* k_rad, double* k_sph, std::size_t n) {
    ops_for(active_backend()).curvature_core(a, b, da, db, d2b, k_rad, k_sph, n);
}

void flow_rhs(const double* a, const double* b, const double* k_rad,
              const double* k_sph, int dim, double* da_dt, double* db_dt,
              std::size_t n) {
    ops_for(active_backend()).flow_rhs(a, b, k_rad, k_sph, dim, da_dt, db_dt, n);
}

} // namespace nrf::kernels
