#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace kmncs {

/// SplitMix64 (Steele, Lea, Flood 2014): output n is mix(seed + n * gamma),
/// so the stream is a keyed counter and streams split by re-keying.
class SplitMix64 {
public:
    static constexpr std::string_view kAlgorithmId = "splitmix64";
    static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    static constexpr std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Independent seed for sub-task `index` of a stream keyed by `seed`.
    static constexpr std::uint64_t derive(std::uint64_t seed, std::uint64_t index) {
        return mix(mix(seed) ^ mix(index * kGamma + 0x632be59bd9b4e019ULL));
    }

    std::uint64_t next() {
        state_ += kGamma;
        return mix(state_);
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform integer on [0, bound) without modulo bias.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t x;
        do {
            x = next();
        } while (x >= limit);
        return x % bound;
    }

private:
    std::uint64_t state_;
};

/// Box-Muller standard normals; both outputs of each transform are used,
/// the second one cached for the next call.
class GaussianStream {
public:
    explicit GaussianStream(SplitMix64& rng) : rng_(rng) {}

    double next() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - rng_.uniform();  // (0, 1]
        const double u2 = rng_.uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    SplitMix64& rng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace kmncs
