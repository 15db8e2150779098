#pragma once

#include <cstdint>

namespace mfc {

// Small counter-style generator (splitmix64). Used everywhere randomness is
// needed so that results do not depend on the standard library's
// implementation-defined distributions.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30u)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27u)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31u);
    }

    // Uniform in [0, 1).
    double next_unit() { return static_cast<double>(next_u64() >> 11u) * 0x1.0p-53; }

    // Uniform in [lo, hi).
    double next_range(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

    // Uniform integer in [0, n).
    int next_index(int n) { return static_cast<int>(next_u64() % static_cast<std::uint64_t>(n)); }

  private:
    std::uint64_t state_;
};

// Stream key for deriving independent per-entity generators from one master
// seed; entity i always sees the same stream regardless of execution order.
inline std::uint64_t derive_stream(std::uint64_t master_seed, std::uint64_t entity) {
    SplitMix64 mix(master_seed ^ (0x632be59bd9b4e019ull * (entity + 1)));
    return mix.next_u64();
}

}  // namespace mfc
