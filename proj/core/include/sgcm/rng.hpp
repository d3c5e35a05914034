#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace sgcm {

/// Deterministic random stream with splittable substreams.
///
/// Every stochastic routine in the library receives an explicit Rng (or a
/// seed) instead of touching global state.  Substreams are derived by hashing
/// (seed, stream index) with a SplitMix64-style finalizer, so replicate b of a
/// bootstrap or simulation always consumes the same stream no matter how many
/// worker threads are active or in which order replicates are scheduled.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    /// Collision-resistant substream seed for (master, stream).
    static std::uint64_t derive(std::uint64_t master, std::uint64_t stream);

    /// New generator seeded from substream `stream` of this generator's seed.
    /// Pure: does not advance this generator.
    [[nodiscard]] Rng spawn(std::uint64_t stream) const {
        return Rng(derive(seed_, stream));
    }

    std::uint64_t seed() const { return seed_; }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Standard normal via the polar method (one cached spare).
    double normal();

    /// Uniform integer in [0, n).  Unbiased via rejection.
    std::uint64_t uniform_below(std::uint64_t n);

    /// Rademacher sign, +1 or -1 with equal probability.
    double sign() { return (engine_() >> 63) ? 1.0 : -1.0; }

    /// Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(uniform_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace sgcm
