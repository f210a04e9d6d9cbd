#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace liqspread {

/// Philox4x32-10 counter-based generator (Salmon et al., Random123).
/// Output depends only on (key, counter), so any path can be regenerated
/// independently of thread assignment or processing order.
class Philox4x32 {
public:
    using Block = std::array<std::uint32_t, 4>;

    explicit Philox4x32(std::uint64_t seed)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

    Block operator()(Block ctr) const {
        std::uint32_t k0 = key_[0], k1 = key_[1];
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                k0 += 0x9E3779B9u;
                k1 += 0xBB67AE85u;
            }
            const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ k0, static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ k1, static_cast<std::uint32_t>(p0)};
        }
        return ctr;
    }

private:
    std::array<std::uint32_t, 2> key_;
};

/// Maps 32 random bits to the open interval (0, 1).
inline double to_unit(std::uint32_t bits) {
    return (static_cast<double>(bits) + 0.5) * 0x1p-32;
}

/// Four standard normals from one Philox block (two Box-Muller pairs).
inline std::array<double, 4> normals4(const Philox4x32::Block& b) {
    std::array<double, 4> z{};
    for (int k = 0; k < 2; ++k) {
        const double r = std::sqrt(-2.0 * std::log(to_unit(b[2 * k])));
        const double phi = 2.0 * std::numbers::pi * to_unit(b[2 * k + 1]);
        z[2 * k] = r * std::cos(phi);
        z[2 * k + 1] = r * std::sin(phi);
    }
    return z;
}

/// SplitMix64 finaliser, used to derive independent seeds.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (salt + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

} // namespace liqspread
