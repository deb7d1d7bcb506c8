#include "irlab/kernels.hpp"

#include <cmath>

namespace irlab::kernels {
namespace {

// Lane-blocked accumulation mirroring the AVX2 variant exactly: four partial
// sums over strided elements, pairwise reduce, scalar tail appended last.

double dot_scalar(const double* x, const double* y, std::size_t n) {
    double l0 = 0.0, l1 = 0.0, l2 = 0.0, l3 = 0.0;
    const std::size_t n4 = n & ~std::size_t{3};
    for (std::size_t i = 0; i < n4; i += 4) {
        l0 += x[i] * y[i];
        l1 += x[i + 1] * y[i + 1];
        l2 += x[i + 2] * y[i + 2];
        l3 += x[i + 3] * y[i + 3];
    }
    double r = (l0 + l1) + (l2 + l3);
    for (std::size_t i = n4; i < n; ++i) r += x[i] * y[i];
    return r;
}

void axpy_scalar(double* y, double a, const double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

double sum_scalar(const double* x, std::size_t n) {
    double l0 = 0.0, l1 = 0.0, l2 = 0.0, l3 = 0.0;
    const std::size_t n4 = n & ~std::size_t{3};
    for (std::size_t i = 0; i < n4; i += 4) {
        l0 += x[i];
        l1 += x[i + 1];
        l2 += x[i + 2];
        l3 += x[i + 3];
    }
    double r = (l0 + l1) + (l2 + l3);
    for (std::size_t i = n4; i < n; ++i) r += x[i];
    return r;
}

double l1_scalar(const double* x, const double* y, std::size_t n) {
    double l0 = 0.0, l1 = 0.0, l2 = 0.0, l3 = 0.0;
    const std::size_t n4 = n & ~std::size_t{3};
    for (std::size_t i = 0; i < n4; i += 4) {
        l0 += std::fabs(x[i] - y[i]);
        l1 += std::fabs(x[i + 1] - y[i + 1]);
        l2 += std::fabs(x[i + 2] - y[i + 2]);
        l3 += std::fabs(x[i + 3] - y[i + 3]);
    }
    double r = (l0 + l1) + (l2 + l3);
    for (std::size_t i = n4; i < n; ++i) r += std::fabs(x[i] - y[i]);
    return r;
}

}  // namespace

const Ops& scalar_ops() {
    static const Ops ops{"scalar", dot_scalar, axpy_scalar, sum_scalar, l1_scalar};
    return ops;
}

}  // namespace irlab::kernels
