#include "broadwell/kernels.hpp"

#if defined(__ARM_NEON) || defined(__aarch64__)

#include <arm_neon.h>

#include <cmath>
#include <limits>

namespace broadwell::kernels {

namespace {

constexpr std::size_t K = 2;  // float64x2_t

void collision_q_neon(const double* m1, const double* m2, const double* m3,
                      const double* m4, double* out, std::size_t n, double coef) {
    const float64x2_t vc = vdupq_n_f64(coef);
    std::size_t i = 0;
    for (; i + K <= n; i += K) {
        float64x2_t gain = vmulq_f64(vld1q_f64(m2 + i), vld1q_f64(m3 + i));
        float64x2_t loss = vmulq_f64(vld1q_f64(m1 + i), vld1q_f64(m4 + i));
        vst1q_f64(out + i, vmulq_f64(vc, vsubq_f64(gain, loss)));
    }
    for (; i < n; ++i)
        out[i] = coef * (m2[i] * m3[i] - m1[i] * m4[i]);
}

void axpy_neon(double a, const double* x, double* y, std::size_t n) {
    const float64x2_t va = vdupq_n_f64(a);
    std::size_t i = 0;
    for (; i + K <= n; i += K) {
        float64x2_t v = vaddq_f64(vld1q_f64(y + i), vmulq_f64(va, vld1q_f64(x + i)));
        vst1q_f64(y + i, v);
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

void upwind_pair_neon(double* out, const double* u, const double* uprev,
                      double cfl, std::size_t n) {
    const float64x2_t vc = vdupq_n_f64(cfl);
    std::size_t i = 0;
    for (; i + K <= n; i += K) {
        float64x2_t vu = vld1q_f64(u + i);
        float64x2_t vp = vld1q_f64(uprev + i);
        vst1q_f64(out + i, vsubq_f64(vu, vmulq_f64(vc, vsubq_f64(vu, vp))));
    }
    for (; i < n; ++i)
        out[i] = u[i] - cfl * (u[i] - uprev[i]);
}

double sup_abs_diff_neon(const double* a, const double* b, std::size_t n) {
    float64x2_t vm = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + K <= n; i += K)
        vm = vmaxq_f64(vm, vabsq_f64(vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i))));
    double m = std::fmax(vgetq_lane_f64(vm, 0), vgetq_lane_f64(vm, 1));
    for (; i < n; ++i) {
        const double d = std::fabs(a[i] - b[i]);
        if (d > m) m = d;
    }
    return m;
}

double max_abs_neon(const double* a, std::size_t n) {
    float64x2_t vm = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + K <= n; i += K)
        vm = vmaxq_f64(vm, vabsq_f64(vld1q_f64(a + i)));
    double m = std::fmax(vgetq_lane_f64(vm, 0), vgetq_lane_f64(vm, 1));
    for (; i < n; ++i) {
        const double d = std::fabs(a[i]);
        if (d > m) m = d;
    }
    return m;
}

double min_value_neon(const double* a, std::size_t n) {
    float64x2_t vm = vdupq_n_f64(std::numeric_limits<double>::infinity());
    std::size_t i = 0;
    for (; i + K <= n; i += K)
        vm = vminq_f64(vm, vld1q_f64(a + i));
    double m = std::fmin(vgetq_lane_f64(vm, 0), vgetq_lane_f64(vm, 1));
    for (; i < n; ++i)
        if (a[i] < m) m = a[i];
    return m;
}

const Ops kNeon = {
    collision_q_neon, axpy_neon, upwind_pair_neon,
    sup_abs_diff_neon, max_abs_neon, min_value_neon,
};

}  // namespace

const Ops& neon_ops() { return kNeon; }

}  // namespace broadwell::kernels

#endif  // __ARM_NEON
