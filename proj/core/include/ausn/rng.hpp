#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace ausn {

// Deterministic normal samples: mt19937_64 uniforms through Box-Muller.
// std::normal_distribution output is implementation-defined, this is not.
inline std::vector<double> seeded_normal(std::uint64_t seed, std::size_t count,
                                         double mean = 0.0, double stddev = 1.0) {
    std::mt19937_64 gen(seed);
    std::vector<double> out;
    out.reserve(count);
    constexpr double kTwoPi = 6.283185307179586476925286766559;
    while (out.size() < count) {
        // u1 in (0, 1], u2 in [0, 1).
        const double u1 =
            (static_cast<double>(gen() >> 11) + 1.0) / 9007199254740993.0;
        const double u2 = static_cast<double>(gen() >> 11) / 9007199254740992.0;
        const double r = std::sqrt(-2.0 * std::log(u1));
        out.push_back(mean + stddev * r * std::cos(kTwoPi * u2));
        if (out.size() < count) {
            out.push_back(mean + stddev * r * std::sin(kTwoPi * u2));
        }
    }
    return out;
}

}  // namespace ausn
