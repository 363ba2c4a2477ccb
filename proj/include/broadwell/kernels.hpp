#pragma once

#include <cstddef>

namespace broadwell::kernels {

// Flat array kernels behind the field and upwind loops. Each entry has a
// scalar reference implementation and, where the host supports it, an AVX2
// or NEON variant selected once at startup. Variants must produce bitwise
// identical results to the scalar reference (element expressions are kept
// fma-free; max/min reductions are exact), which the unit tests enforce.
struct Ops {
    // out[i] = coef * (m2[i]*m3[i] - m1[i]*m4[i])
    void (*collision_q)(const double* m1, const double* m2, const double* m3,
                        const double* m4, double* out, std::size_t n, double coef);
    // y[i] += a * x[i]
    void (*axpy)(double a, const double* x, double* y, std::size_t n);
    // out[i] = u[i] - cfl * (u[i] - uprev[i]); out must not alias u/uprev
    void (*upwind_pair)(double* out, const double* u, const double* uprev,
                        double cfl, std::size_t n);
    double (*sup_abs_diff)(const double* a, const double* b, std::size_t n);
    double (*max_abs)(const double* a, std::size_t n);
    double (*min_value)(const double* a, std::size_t n);
};

const Ops& scalar_ops();

// Runtime-selected backend. Honors BROADWELL2D_KERNELS=scalar for forcing
// the reference path.
const Ops& ops();

const char* active_backend();

#if defined(BROADWELL_HAVE_AVX2_TU)
const Ops& avx2_ops();  // call only if the host supports AVX2
#endif
#if defined(__ARM_NEON) || defined(__aarch64__)
const Ops& neon_ops();
#endif

}  // namespace broadwell::kernels
