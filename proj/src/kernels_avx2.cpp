#include "irlab/kernels.hpp"

#include <cmath>

#if defined(__x86_64__) || defined(_M_X64)
#define IRLAB_X86_64 1
#include <immintrin.h>
#else
#define IRLAB_X86_64 0
#endif

namespace irlab::kernels {

#if IRLAB_X86_64

namespace {

// mul+add on purpose (no fmadd): keeps results bit-identical to the scalar
// reference, which is compiled with contraction off.

__attribute__((target("avx2"))) double dot_avx2(const double* x, const double* y, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    const std::size_t n4 = n & ~std::size_t{3};
    for (std::size_t i = 0; i < n4; i += 4) {
        const __m256d vx = _mm256_loadu_pd(x + i);
        const __m256d vy = _mm256_loadu_pd(y + i);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(vx, vy));
    }
    alignas(32) double lane[4];
    _mm256_store_pd(lane, acc);
    double r = (lane[0] + lane[1]) + (lane[2] + lane[3]);
    for (std::size_t i = n4; i < n; ++i) r += x[i] * y[i];
    return r;
}

__attribute__((target("avx2"))) void axpy_avx2(double* y, double a, const double* x, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    const std::size_t n4 = n & ~std::size_t{3};
    for (std::size_t i = 0; i < n4; i += 4) {
        const __m256d vx = _mm256_loadu_pd(x + i);
        const __m256d vy = _mm256_loadu_pd(y + i);
        _mm256_storeu_pd(y + i, _mm256_add_pd(vy, _mm256_mul_pd(va, vx)));
    }
    for (std::size_t i = n4; i < n; ++i) y[i] += a * x[i];
}

__attribute__((target("avx2"))) double sum_avx2(const double* x, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    const std::size_t n4 = n & ~std::size_t{3};
    for (std::size_t i = 0; i < n4; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
    alignas(32) double lane[4];
    _mm256_store_pd(lane, acc);
    double r = (lane[0] + lane[1]) + (lane[2] + lane[3]);
    for (std::size_t i = n4; i < n; ++i) r += x[i];
    return r;
}

__attribute__((target("avx2"))) double l1_avx2(const double* x, const double* y, std::size_t n) {
    const __m256d sign_mask = _mm256_set1_pd(-0.0);
    __m256d acc = _mm256_setzero_pd();
    const std::size_t n4 = n & ~std::size_t{3};
    for (std::size_t i = 0; i < n4; i += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
        acc = _mm256_add_pd(acc, _mm256_andnot_pd(sign_mask, d));
    }
    alignas(32) double lane[4];
    _mm256_store_pd(lane, acc);
    double r = (lane[0] + lane[1]) + (lane[2] + lane[3]);
    for (std::size_t i = n4; i < n; ++i) r += std::fabs(x[i] - y[i]);
    return r;
}

}  // namespace

bool avx2_available() {
    return __builtin_cpu_supports("avx2") != 0;
}

const Ops& avx2_ops() {
    static const Ops ops{"avx2", dot_avx2, axpy_avx2, sum_avx2, l1_avx2};
    return ops;
}

#else  // !IRLAB_X86_64

bool avx2_available() { return false; }
const Ops& avx2_ops() { return scalar_ops(); }

#endif

}  // namespace irlab::kernels
