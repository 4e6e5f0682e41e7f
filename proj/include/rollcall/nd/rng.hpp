#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace rollcall::nd {

// Deterministic 64-bit PRNG: xoshiro256++ with the state expanded from the
// seed by splitmix64. Both algorithms are fixed here and in the README; a
// given seed produces the identical stream on every platform. All randomness
// in the project flows through this class (no std::random_device anywhere).
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t next_u64();

    // 53-bit mantissa uniform in [0, 1).
    double uniform01();
    double uniform(double lo, double hi);

    // Unbiased integer in [0, n); n >= 1.
    std::uint64_t below(std::uint64_t n);

    // Independent child stream; same (seed, stream_id) -> same child.
    Rng derive(std::uint64_t stream_id) const;

    // Fisher-Yates with this stream; std::shuffle is not portable.
    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t seed_ = 0;
    std::array<std::uint64_t, 4> s_{};
};

std::uint64_t splitmix64_next(std::uint64_t& state);

}  // namespace rollcall::nd
