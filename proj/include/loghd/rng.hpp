#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace loghd {

/// Seeded random stream with a platform-independent value mapping.
///
/// std::mt19937_64 has a fully specified output sequence, but the standard
/// distributions do not, so uniform and normal draws are derived from the raw
/// 64-bit words here.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53 bits of resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, bound). bound must be > 0.
    std::uint64_t below(std::uint64_t bound);

    /// Standard normal via Box-Muller (no cached second variate).
    double normal();

private:
    std::mt19937_64 engine_;
};

/// SplitMix64 finalizer; used to derive independent sub-seeds.
std::uint64_t mix_seed(std::uint64_t x);

/// Sub-seed derived from a parent seed and a textual key.
std::uint64_t derive_seed(std::uint64_t parent, std::string_view key);

}  // namespace loghd
