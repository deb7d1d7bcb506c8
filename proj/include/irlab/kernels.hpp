#pragma once

#include <cstddef>

// Dense double-precision kernels behind the dynamic-programming inner loops
// (occupancy pushforward, value backups, inner products, L1 distances).
//
// Two implementations exist: a scalar reference and an AVX2 variant selected
// at runtime.  Both accumulate in the same lane-blocked order (four partial
// sums, reduced as (l0+l1)+(l2+l3), scalar tail last) and neither uses fused
// multiply-add, so their results are bit-identical.  The equivalence suite
// asserts exact equality, and run outputs do not depend on which variant the
// dispatcher picked.
//
// Set IRLAB_KERNELS=scalar or IRLAB_KERNELS=avx2 to override the dispatcher.

namespace irlab::kernels {

struct Ops {
    const char* name;
    // sum_i x[i]*y[i]
    double (*dot)(const double* x, const double* y, std::size_t n);
    // y[i] += a*x[i]
    void (*axpy)(double* y, double a, const double* x, std::size_t n);
    // sum_i x[i]
    double (*sum)(const double* x, std::size_t n);
    // sum_i |x[i]-y[i]|
    double (*l1_distance)(const double* x, const double* y, std::size_t n);
};

const Ops& scalar_ops();
bool avx2_available();
// Valid only when avx2_available(); aliases scalar_ops() otherwise.
const Ops& avx2_ops();
// Runtime-selected variant (env override honored). Stable for process lifetime.
const Ops& active();

inline double dot(const double* x, const double* y, std::size_t n) {
    return active().dot(x, y, n);
}
inline void axpy(double* y, double a, const double* x, std::size_t n) {
    active().axpy(y, a, x, n);
}
inline double sum(const double* x, std::size_t n) {
    return active().sum(x, n);
}
inline double l1_distance(const double* x, const double* y, std::size_t n) {
    return active().l1_distance(x, y, n);
}

}  // namespace irlab::kernels
