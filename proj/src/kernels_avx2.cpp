#include "nrf/kernels.hpp"

#include <immintrin.h>

// AVX2 lane. Elementwise kernels replicate the scalar reference's operation
// order exactly (no FMA), so results are bit-identical; reductions use
// per-lane partial results and may differ from scalar in the last ulps.

namespace nrf::kernels {
namespace {

inline double hmax(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    __m128d m = _mm_max_pd(lo, hi);
    m = _mm_max_sd(m, _mm_unpackhi_pd(m, m));
    return _mm_cvtsd_f64(m);
}

inline double hmin(__m128d lo, __m128d hi) {
    __m128d m = _mm_min_pd(lo, hi);
    m = _mm_min_sd(m, _mm_unpackhi_pd(m, m));
    return _mm_cvtsd_f64(m);
}

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    __m128d s = _mm_add_pd(lo, hi);
    s = _mm_add_sd(s, _mm_unpackhi_pd(s, s));
    return _mm_cvtsd_f64(s);
}

void v_axpy(const double* x, const double* k, double c, double* y, std::size_t n) {
    std::size_t i = 0;
    const __m256d vc = _mm256_set1_pd(c);
    for (; i + 4 <= n; i += 4) {
        __m256d vx = _mm256_loadu_pd(x + i);
        __m256d vk = _mm256_loadu_pd(k + i);
        _mm256_storeu_pd(y + i, _mm256_add_pd(vx, _mm256_mul_pd(vc, vk)));
    }
    for (; i < n; ++i) y[i] = x[i] + c * k[i];
}

void v_rk4_combine(const double* x, const double* k1, const double* k2,
                   const double* k3, const double* k4,
                   double c1, double c2, double c3, double c4,
                   double* y, std::size_t n) {
    std::size_t i = 0;
    const __m256d v1 = _mm256_set1_pd(c1), v2 = _mm256_set1_pd(c2);
    const __m256d v3 = _mm256_set1_pd(c3), v4 = _mm256_set1_pd(c4);
    for (; i + 4 <= n; i += 4) {
        __m256d t12 = _mm256_add_pd(_mm256_mul_pd(v1, _mm256_loadu_pd(k1 + i)),
                                    _mm256_mul_pd(v2, _mm256_loadu_pd(k2 + i)));
        __m256d t34 = _mm256_add_pd(_mm256_mul_pd(v3, _mm256_loadu_pd(k3 + i)),
                                    _mm256_mul_pd(v4, _mm256_loadu_pd(k4 + i)));
        __m256d r = _mm256_add_pd(_mm256_add_pd(_mm256_loadu_pd(x + i), t12), t34);
        _mm256_storeu_pd(y + i, r);
    }
    for (; i < n; ++i)
        y[i] = x[i] + (c1 * k1[i] + c2 * k2[i]) + (c3 * k3[i] + c4 * k4[i]);
}

void v_conv5(const double* f, const double* w, double* out, std::size_t i0, std::size_t i1) {
    const __m256d w0 = _mm256_set1_pd(w[0]), w1 = _mm256_set1_pd(w[1]),
                  w2 = _mm256_set1_pd(w[2]), w3 = _mm256_set1_pd(w[3]),
                  w4 = _mm256_set1_pd(w[4]);
    std::size_t i = i0;
    for (; i + 4 <= i1; i += 4) {
        const double* p = f + i - 2;
        __m256d t01 = _mm256_add_pd(_mm256_mul_pd(w0, _mm256_loadu_pd(p)),
                                    _mm256_mul_pd(w1, _mm256_loadu_pd(p + 1)));
        __m256d t012 = _mm256_add_pd(t01, _mm256_mul_pd(w2, _mm256_loadu_pd(p + 2)));
        __m256d t34 = _mm256_add_pd(_mm256_mul_pd(w3, _mm256_loadu_pd(p + 3)),
                                    _mm256_mul_pd(w4, _mm256_loadu_pd(p + 4)));
        _mm256_storeu_pd(out + i, _mm256_add_pd(t012, t34));
    }
    for (; i < i1; ++i) {
        const double* p = f + i - 2;
        out[i] = (w[0] * p[0] + w[1] * p[1]) + w[2] * p[2] + (w[3] * p[3] + w[4] * p[4]);
    }
}

void v_conv7(const double* f, const double* w, double* out, std::size_t i0, std::size_t i1) {
    const __m256d w0 = _mm256_set1_pd(w[0]), w1 = _mm256_set1_pd(w[1]),
                  w2 = _mm256_set1_pd(w[2]), w3 = _mm256_set1_pd(w[3]),
                  w4 = _mm256_set1_pd(w[4]), w5 = _mm256_set1_pd(w[5]),
                  w6 = _mm256_set1_pd(w[6]);
    std::size_t i = i0;
    for (; i + 4 <= i1; i += 4) {
        const double* p = f + i - 3;
        __m256d t01 = _mm256_add_pd(_mm256_mul_pd(w0, _mm256_loadu_pd(p)),
                                    _mm256_mul_pd(w1, _mm256_loadu_pd(p + 1)));
        __m256d t23 = _mm256_add_pd(_mm256_mul_pd(w2, _mm256_loadu_pd(p + 2)),
                                    _mm256_mul_pd(w3, _mm256_loadu_pd(p + 3)));
        __m256d t45 = _mm256_add_pd(_mm256_mul_pd(w4, _mm256_loadu_pd(p + 4)),
                                    _mm256_mul_pd(w5, _mm256_loadu_pd(p + 5)));
        __m256d left = _mm256_add_pd(t01, t23);
        __m256d right = _mm256_add_pd(t45, _mm256_mul_pd(w6, _mm256_loadu_pd(p + 6)));
        _mm256_storeu_pd(out + i, _mm256_add_pd(left, right));
    }
    for (; i < i1; ++i) {
        const double* p = f + i - 3;
        out[i] = ((w[0] * p[0] + w[1] * p[1]) + (w[2] * p[2] + w[3] * p[3]))
               + ((w[4] * p[4] + w[5] * p[5]) + w[6] * p[6]);
    }
}

double v_min_value(const double* x, std::size_t n) {
    if (n < 8) return scalar_ops().min_value(x, n);
    __m256d m = _mm256_loadu_pd(x);
    std::size_t i = 4;
    for (; i + 4 <= n; i += 4) m = _mm256_min_pd(m, _mm256_loadu_pd(x + i));
    double tail = x[n - 1];
    for (std::size_t j = i; j < n; ++j) tail = x[j] < tail ? x[j] : tail;
    double vm = hmin(_mm256_castpd256_pd128(m), _mm256_extractf128_pd(m, 1));
    return tail < vm ? tail : vm;
}

double v_max_abs(const double* x, std::size_t n) {
    const __m256d sign = _mm256_set1_pd(-0.0);
    __m256d m = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        m = _mm256_max_pd(m, _mm256_andnot_pd(sign, _mm256_loadu_pd(x + i)));
    double r = hmax(m);
    for (; i < n; ++i) {
        double v = x[i] < 0 ? -x[i] : x[i];
        r = v > r ? v : r;
    }
    return r;
}

double v_max_abs_diff(const double* x, const double* y, std::size_t n) {
    const __m256d sign = _mm256_set1_pd(-0.0);
    __m256d m = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
        m = _mm256_max_pd(m, _mm256_andnot_pd(sign, d));
    }
    double r = hmax(m);
    for (; i < n; ++i) {
        double v = x[i] - y[i];
        v = v < 0 ? -v : v;
        r = v > r ? v : r;
    }
    return r;
}

double v_weighted_dot(const double* x, const double* y, const double* w, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d t = _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
        acc = _mm256_add_pd(acc, _mm256_mul_pd(t, _mm256_loadu_pd(w + i)));
    }
    double s = hsum(acc);
    for (; i < n; ++i) s += x[i] * y[i] * w[i];
    return s;
}

void v_curvature_core(const double* a, const double* b, const double* da,
                      const double* db, const double* d2b,
                      double* k_rad, double* k_sph, std::size_t n) {
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d negz = _mm256_set1_pd(-0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d ai = _mm256_loadu_pd(a + i);
        __m256d bi = _mm256_loadu_pd(b + i);
        __m256d dai = _mm256_loadu_pd(da + i);
        __m256d dbi = _mm256_loadu_pd(db + i);
        __m256d d2bi = _mm256_loadu_pd(d2b + i);
        __m256d a2 = _mm256_mul_pd(ai, ai);
        __m256d bs = _mm256_div_pd(dbi, ai);
        __m256d t1 = _mm256_div_pd(d2bi, a2);
        __m256d t2 = _mm256_div_pd(_mm256_mul_pd(dbi, dai), _mm256_mul_pd(a2, ai));
        __m256d bss = _mm256_sub_pd(t1, t2);
        __m256d kr = _mm256_div_pd(_mm256_xor_pd(bss, negz), bi);
        __m256d ks = _mm256_div_pd(_mm256_sub_pd(one, _mm256_mul_pd(bs, bs)),
                                   _mm256_mul_pd(bi, bi));
        _mm256_storeu_pd(k_rad + i, kr);
        _mm256_storeu_pd(k_sph + i, ks);
    }
    if (i < n)
        scalar_ops().curvature_core(a + i, b + i, da + i, db + i, d2b + i,
                                    k_rad + i, k_sph + i, n - i);
}

void v_flow_rhs(const double* a, const double* b, const double* k_rad,
                const double* k_sph, int dim, double* da_dt, double* db_dt,
                std::size_t n) {
    const __m256d nm1 = _mm256_set1_pd(double(dim - 1));
    const __m256d nm2 = _mm256_set1_pd(double(dim - 2));
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d negz = _mm256_set1_pd(-0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d kr = _mm256_loadu_pd(k_rad + i);
        __m256d ks = _mm256_loadu_pd(k_sph + i);
        __m256d h_rad = _mm256_mul_pd(nm1, _mm256_add_pd(kr, one));
        __m256d h_tan = _mm256_add_pd(_mm256_add_pd(kr, _mm256_mul_pd(nm2, ks)), nm1);
        __m256d na = _mm256_xor_pd(_mm256_loadu_pd(a + i), negz);
        __m256d nb = _mm256_xor_pd(_mm256_loadu_pd(b + i), negz);
        _mm256_storeu_pd(da_dt + i, _mm256_mul_pd(na, h_rad));
        _mm256_storeu_pd(db_dt + i, _mm256_mul_pd(nb, h_tan));
    }
    if (i < n)
        scalar_ops().flow_rhs(a + i, b + i, k_rad + i, k_sph + i, dim,
                              da_dt + i, db_dt + i, n - i);
}

} // namespace

const Ops& avx2_ops() {
    static const Ops ops{
        v_axpy, v_rk4_combine, v_conv5, v_conv7, v_min_value, v_max_abs,
        v_max_abs_diff, v_weighted_dot, v_curvature_core, v_flow_rhs,
    };
    return ops;
}

} // namespace nrf::kernels
