#include "irlab/rng.hpp"

#include <cmath>

namespace irlab::rng {

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return h;
}

int uniform_int(SplitMix64& g, int n) {
    const unsigned __int128 wide = static_cast<unsigned __int128>(g.next_u64()) *
                                   static_cast<unsigned __int128>(static_cast<std::uint64_t>(n));
    return static_cast<int>(wide >> 64);
}

int sample_categorical(SplitMix64& g, const double* p, int n) {
    const double u = g.next_double();
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        acc += p[i];
        if (u < acc) return i;
    }
    return n - 1;
}

std::vector<double> random_distribution(SplitMix64& g, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    double total = 0.0;
    for (double& x : v) {
        // -log(1-u) with u in [0,1) keeps the argument strictly positive.
        x = -std::log1p(-g.next_double());
        if (x <= 0.0) x = 1e-300;
        total += x;
    }
    for (double& x : v) x /= total;
    return v;
}

}  // namespace irlab::rng
