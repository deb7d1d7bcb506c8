#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

// Pinned pseudo-random generator contract.  Every sampled artifact (demo
// datasets, random scenarios, adversarial sequences) derives from SplitMix64
// streams keyed by (seed, purpose string), so results are reproducible across
// platforms and standard libraries.  Manifests record kAlgorithmId.

namespace irlab::rng {

inline constexpr const char* kAlgorithmId = "splitmix64-v1";

std::uint64_t fnv1a64(std::string_view s);

class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // [0, 1), 53 random bits
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Child generator with an independent-looking trajectory.
    SplitMix64 split() { return SplitMix64(next_u64()); }

private:
    std::uint64_t state_;
};

// Stream keyed by seed and a purpose label; primary way modules draw entropy.
inline SplitMix64 stream(std::uint64_t seed, std::string_view purpose) {
    return SplitMix64(seed ^ fnv1a64(purpose));
}

// Uniform int in [0, n) via 128-bit multiply (no modulo bias to speak of,
// and identical everywhere).
int uniform_int(SplitMix64& g, int n);

// Inverse-CDF draw from a length-n probability vector; returns n-1 on
// accumulated-rounding fallthrough.
int sample_categorical(SplitMix64& g, const double* p, int n);

// n i.i.d. Exp(1) draws normalized to a probability vector.
std::vector<double> random_distribution(SplitMix64& g, int n);

}  // namespace irlab::rng
