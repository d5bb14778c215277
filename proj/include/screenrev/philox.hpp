#pragma once

#include <array>
#include <cstdint>

namespace screenrev
{
/*!
 * Philox4x32-10 counter-based generator (Salmon et al., SC'11).
 *
 * Stateless: the output block is a pure function of a 128-bit counter and a
 * 64-bit key, so any draw can be recomputed from its index alone.
 */
struct Philox4x32
{
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static constexpr std::uint32_t m0 = 0xD2511F53u;
    static constexpr std::uint32_t m1 = 0xCD9E8D57u;
    static constexpr std::uint32_t w0 = 0x9E3779B9u;
    static constexpr std::uint32_t w1 = 0xBB67AE85u;
    static constexpr int rounds = 10;

    static constexpr Counter generate(Counter ctr, Key key)
    {
        for (int r = 0; r < rounds; ++r)
        {
            if (r > 0)
            {
                key[0] += w0;
                key[1] += w1;
            }
            std::uint64_t p0 = std::uint64_t{m0} * ctr[0];
            std::uint64_t p1 = std::uint64_t{m1} * ctr[2];
            auto hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
            auto hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        }
        return ctr;
    }

    //! Double in [0, 1) from two 32-bit words (53 random bits)
    static constexpr double to_unit(std::uint32_t hi, std::uint32_t lo)
    {
        std::uint64_t bits = ((std::uint64_t{hi} << 32) | lo) >> 11;
        return static_cast<double>(bits) * 0x1.0p-53;
    }
};

}  // namespace screenrev
