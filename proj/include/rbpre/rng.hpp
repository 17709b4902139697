/*
   Copyright 2026 The reduced_bpre Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace rbpre {

/// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Named sub-streams so that independent estimators sharing one user seed
/// never reuse a random state.
enum class Stream : std::uint64_t {
    kGeneric = 0,
    kIncrements = 1,
    kTrials = 2,
    kEnsemble = 3,
    kMeander = 4,
    kLadder = 5,
    kEventB = 6,
    kTheta = 7,
    kConditioned = 8,
    kExpFunctional = 9,
};

/// xoshiro256** with counter-based construction: the state of trial `index`
/// in stream `stream` is a pure function of (seed, stream, index), so batch
/// results never depend on how trials are split across threads.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed) noexcept
    {
        std::uint64_t sm = seed;
        for (auto& word : state_) {
            sm += 0x9E3779B97F4A7C15ULL;
            word = mix64(sm);
        }
    }

    static Rng for_trial(std::uint64_t seed, Stream stream, std::uint64_t index) noexcept
    {
        std::uint64_t key = mix64(seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(stream) + 1));
        key = mix64(key ^ (index * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL));
        return Rng(key);
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept
    {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform on the open interval (0, 1).
    double uniform() noexcept { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }

    double exponential() noexcept { return -std::log(uniform()); }

    /// Standard normal via the Marsaglia-Tsang ziggurat (128 layers). The
    /// layer index and the magnitude come from disjoint bits of one draw.
    double normal() noexcept
    {
        const auto& z = tables();
        for (;;) {
            const std::uint64_t u = (*this)();
            const auto hz = static_cast<std::int32_t>(static_cast<std::uint32_t>(u >> 32));
            const unsigned iz = static_cast<unsigned>(u & 127U);
            const auto mag = static_cast<std::uint32_t>(hz < 0 ? -static_cast<std::int64_t>(hz) : hz);
            const double x = hz * z.wn[iz];
            if (mag < z.kn[iz]) return x;
            if (iz == 0) {
                double tx, ty;
                do {
                    tx = -std::log(uniform()) / kR;
                    ty = -std::log(uniform());
                } while (ty + ty < tx * tx);
                return hz > 0 ? kR + tx : -kR - tx;
            }
            if (z.fn[iz] + uniform() * (z.fn[iz - 1] - z.fn[iz]) < std::exp(-0.5 * x * x)) return x;
        }
    }

private:
    static constexpr double kR = 3.442619855899;

    struct Tables {
        std::array<std::uint32_t, 128> kn{};
        std::array<double, 128> wn{};
        std::array<double, 128> fn{};
    };

    static const Tables& tables() noexcept
    {
        static const Tables t = [] {
            Tables z;
            constexpr double m1 = 2147483648.0;
            constexpr double vn = 9.91256303526217e-3;
            double dn = kR;
            double tn = dn;
            const double q = vn / std::exp(-0.5 * dn * dn);
            z.kn[0] = static_cast<std::uint32_t>((dn / q) * m1);
            z.kn[1] = 0;
            z.wn[0] = q / m1;
            z.wn[127] = dn / m1;
            z.fn[0] = 1.0;
            z.fn[127] = std::exp(-0.5 * dn * dn);
            for (int i = 126; i >= 1; --i) {
                dn = std::sqrt(-2.0 * std::log(vn / dn + std::exp(-0.5 * dn * dn)));
                z.kn[i + 1] = static_cast<std::uint32_t>((dn / tn) * m1);
                tn = dn;
                z.fn[i] = std::exp(-0.5 * dn * dn);
                z.wn[i] = dn / m1;
            }
            return z;
        }();
        return t;
    }

    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }

    std::array<std::uint64_t, 4> state_{};
};

} // namespace rbpre
