// Copyright (c) 2026 sstrace contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>

namespace sst {

/// Counter-based random stream. Every consumer derives its own stream from
/// (seed, salt words), so results are independent of thread scheduling and
/// evaluation order across streams. The generator core is the splitmix64
/// finalizer over an incrementing counter.
class RandomStream {
  public:
    explicit RandomStream(std::uint64_t seed, std::uint64_t s1 = 0, std::uint64_t s2 = 0,
                          std::uint64_t s3 = 0) {
        state_ = mix(seed);
        state_ = mix(state_ ^ (s1 + 0x9E3779B97F4A7C15ULL));
        state_ = mix(state_ ^ (s2 + 0xBF58476D1CE4E5B9ULL));
        state_ = mix(state_ ^ (s3 + 0x94D049BB133111EBULL));
    }

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix(state_);
    }

    /// Uniform double in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + uniform() * (hi - lo); }

    /// Standard normal via Box-Muller (no caching; two uniforms per draw).
    double normal() {
        const double u1 = 1.0 - uniform();  // (0, 1], keeps the log finite
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

  private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_ = 0;
};

/// Salt words separating independent stream families within one run.
namespace stream_salt {
inline constexpr std::uint64_t kDataset = 0x01;
inline constexpr std::uint64_t kTrainInit = 0x02;
inline constexpr std::uint64_t kTrainShuffle = 0x03;
inline constexpr std::uint64_t kTrainLatent = 0x04;
inline constexpr std::uint64_t kTrainSplit = 0x05;
inline constexpr std::uint64_t kRenderPixel = 0x06;
inline constexpr std::uint64_t kRenderChannel = 0x07;
inline constexpr std::uint64_t kEvalGroundTruth = 0x08;
inline constexpr std::uint64_t kEvalModel = 0x09;
}  // namespace stream_salt

}  // namespace sst
