#pragma once

#include <cstdint>

#include "caplab/math/normal.hpp"

namespace caplab {

inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Derives an independent substream seed from (seed, a, b, c). Used so that
/// scenario i always sees the same draws no matter the execution order or
/// thread count.
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                                    std::uint64_t c = 0) {
    std::uint64_t h = mix64(seed);
    h = mix64(h ^ (a + 0x9e3779b97f4a7c15ULL));
    h = mix64(h ^ (b + 0xc2b2ae3d27d4eb4fULL));
    h = mix64(h ^ (c + 0x165667b19e3779f9ULL));
    return h;
}

/// SplitMix64 stream with inverse-CDF normal draws. Self-contained so the
/// same (seed, index) reproduces bit-identical values on any platform.
class Rng {
   public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform on the open interval (0,1).
    double next_uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal via the inverse CDF (keeps streams monotone and portable).
    double next_normal() { return inv_norm_cdf(next_uniform()); }

   private:
    std::uint64_t state_;
};

namespace stream {
// Tags keeping unrelated substreams of one experiment seed disjoint.
inline constexpr std::uint64_t kDrivers = 1;
inline constexpr std::uint64_t kOuter = 2;
inline constexpr std::uint64_t kInner = 3;
inline constexpr std::uint64_t kTraining = 4;
inline constexpr std::uint64_t kInit = 5;
inline constexpr std::uint64_t kEval = 6;
}  // namespace stream

}  // namespace caplab
