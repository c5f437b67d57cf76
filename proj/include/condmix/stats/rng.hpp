#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <string_view>

namespace condmix {

// FNV-1a, used to fold experiment names into stream ids.
inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

// Reproducible per-(seed, experiment, replica) random stream.  Every draw of
// next_u64 carries 64 bits of entropy; branch-choice comparisons against
// certified interval thresholds consume the raw 64-bit word (see dyadic_unit).
class RngStream {
public:
    RngStream(std::uint64_t seed, std::string_view experiment, std::uint64_t replica) {
        const std::uint64_t tag = fnv1a64(experiment);
        std::seed_seq seq{static_cast<std::uint32_t>(seed),
                          static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(tag),
                          static_cast<std::uint32_t>(tag >> 32),
                          static_cast<std::uint32_t>(replica),
                          static_cast<std::uint32_t>(replica >> 32)};
        gen_.seed(seq);
    }

    std::uint64_t next_u64() { return gen_(); }

    // Uniform double in [0,1) with the full 53 bits of mantissa.
    double next_unit() { return static_cast<double>(gen_() >> 11) * 0x1p-53; }

    // Uniform integer in [0,n), rejection-sampled to avoid modulo bias.
    std::uint64_t next_below(std::uint64_t n) {
        const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
        const std::uint64_t limit = max - max % n;
        std::uint64_t x;
        do {
            x = gen_();
        } while (x >= limit);
        return x % n;
    }

    // Standard normal via Box-Muller; caches the second deviate.
    double next_normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = next_unit();
        if (u1 <= 0.0) u1 = 0x1p-53;
        const double u2 = next_unit();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

private:
    std::mt19937_64 gen_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

inline RngStream rng_stream(std::uint64_t seed, std::string_view experiment,
                            std::uint64_t replica) {
    return RngStream(seed, experiment, replica);
}

}  // namespace condmix
