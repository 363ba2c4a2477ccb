#include "broadwell/kernels.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <limits>

namespace broadwell::kernels {

namespace {

void collision_q_scalar(const double* m1, const double* m2, const double* m3,
                        const double* m4, double* out, std::size_t n, double coef) {
    for (std::size_t i = 0; i < n; ++i)
        out[i] = coef * (m2[i] * m3[i] - m1[i] * m4[i]);
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void upwind_pair_scalar(double* out, const double* u, const double* uprev,
                        double cfl, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        out[i] = u[i] - cfl * (u[i] - uprev[i]);
}

double sup_abs_diff_scalar(const double* a, const double* b, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = std::fabs(a[i] - b[i]);
        if (d > m) m = d;
    }
    return m;
}

double max_abs_scalar(const double* a, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = std::fabs(a[i]);
        if (d > m) m = d;
    }
    return m;
}

double min_value_scalar(const double* a, std::size_t n) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i)
        if (a[i] < m) m = a[i];
    return m;
}

const Ops kScalar = {
    collision_q_scalar, axpy_scalar, upwind_pair_scalar,
    sup_abs_diff_scalar, max_abs_scalar, min_value_scalar,
};

struct Selected {
    const Ops* ops;
    const char* name;
};

Selected select() {
    if (const char* env = std::getenv("BROADWELL2D_KERNELS")) {
        if (std::strcmp(env, "scalar") == 0) return {&kScalar, "scalar"};
    }
#if defined(BROADWELL_HAVE_AVX2_TU)
    if (__builtin_cpu_supports("avx2")) return {&avx2_ops(), "avx2"};
#endif
#if defined(__ARM_NEON) || defined(__aarch64__)
    return {&neon_ops(), "neon"};
#endif
    return {&kScalar, "scalar"};
}

const Selected& selected() {
    static const Selected s = select();
    return s;
}

}  // namespace

const Ops& scalar_ops() { return kScalar; }
const Ops& ops() { return *selected().ops; }
const char* active_backend() { return selected().name; }

}  // namespace broadwell::kernels
