#include "broadwell/kernels.hpp"

#if defined(BROADWELL_HAVE_AVX2_TU)

#include <immintrin.h>

#include <cmath>
#include <limits>

namespace broadwell::kernels {

namespace {

// 256 bits = 4 doubles per lane group.
constexpr std::size_t K = 4;

inline __m256d abs_pd(__m256d v) {
    const __m256d mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
    return _mm256_and_pd(v, mask);
}

inline double hmax_pd(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    __m128d m = _mm_max_pd(lo, hi);
    m = _mm_max_sd(m, _mm_unpackhi_pd(m, m));
    return _mm_cvtsd_f64(m);
}

inline double hmin_pd(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    __m128d m = _mm_min_pd(lo, hi);
    m = _mm_min_sd(m, _mm_unpackhi_pd(m, m));
    return _mm_cvtsd_f64(m);
}

void collision_q_avx2(const double* m1, const double* m2, const double* m3,
                      const double* m4, double* out, std::size_t n, double coef) {
    const __m256d vc = _mm256_set1_pd(coef);
    std::size_t i = 0;
    for (; i + K <= n; i += K) {
        __m256d gain = _mm256_mul_pd(_mm256_loadu_pd(m2 + i), _mm256_loadu_pd(m3 + i));
        __m256d loss = _mm256_mul_pd(_mm256_loadu_pd(m1 + i), _mm256_loadu_pd(m4 + i));
        _mm256_storeu_pd(out + i, _mm256_mul_pd(vc, _mm256_sub_pd(gain, loss)));
    }
    for (; i < n; ++i)
        out[i] = coef * (m2[i] * m3[i] - m1[i] * m4[i]);
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + K <= n; i += K) {
        __m256d v = _mm256_add_pd(_mm256_loadu_pd(y + i),
                                  _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
        _mm256_storeu_pd(y + i, v);
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

void upwind_pair_avx2(double* out, const double* u, const double* uprev,
                      double cfl, std::size_t n) {
    const __m256d vc = _mm256_set1_pd(cfl);
    std::size_t i = 0;
    for (; i + K <= n; i += K) {
        __m256d vu = _mm256_loadu_pd(u + i);
        __m256d vp = _mm256_loadu_pd(uprev + i);
        _mm256_storeu_pd(out + i, _mm256_sub_pd(vu, _mm256_mul_pd(vc, _mm256_sub_pd(vu, vp))));
    }
    for (; i < n; ++i)
        out[i] = u[i] - cfl * (u[i] - uprev[i]);
}

double sup_abs_diff_avx2(const double* a, const double* b, std::size_t n) {
    __m256d vm = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + K <= n; i += K) {
        __m256d d = abs_pd(_mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
        vm = _mm256_max_pd(vm, d);
    }
    double m = hmax_pd(vm);
    for (; i < n; ++i) {
        const double d = std::fabs(a[i] - b[i]);
        if (d > m) m = d;
    }
    return m;
}

double max_abs_avx2(const double* a, std::size_t n) {
    __m256d vm = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + K <= n; i += K)
        vm = _mm256_max_pd(vm, abs_pd(_mm256_loadu_pd(a + i)));
    double m = hmax_pd(vm);
    for (; i < n; ++i) {
        const double d = std::fabs(a[i]);
        if (d > m) m = d;
    }
    return m;
}

double min_value_avx2(const double* a, std::size_t n) {
    __m256d vm = _mm256_set1_pd(std::numeric_limits<double>::infinity());
    std::size_t i = 0;
    for (; i + K <= n; i += K)
        vm = _mm256_min_pd(vm, _mm256_loadu_pd(a + i));
    double m = hmin_pd(vm);
    for (; i < n; ++i)
        if (a[i] < m) m = a[i];
    return m;
}

const Ops kAvx2 = {
    collision_q_avx2, axpy_avx2, upwind_pair_avx2,
    sup_abs_diff_avx2, max_abs_avx2, min_value_avx2,
};

}  // namespace

const Ops& avx2_ops() { return kAvx2; }

}  // namespace broadwell::kernels

#endif  // BROADWELL_HAVE_AVX2_TU
