#pragma once

// Portable random streams.
//
// All randomness is drawn from std::mt19937_64, whose output sequence is fixed
// by the C++ standard. Distributions are implemented here rather than taken
// from <random> because the standard library's distribution algorithms differ
// between implementations.
//
// Stream splitting: a stream is identified by (seed, stream_id) and seeded with
// derive_seed(seed, stream_id), which runs both words through splitmix64.
// Reserved stream ids are listed in `streams`.

#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <utility>

namespace cqubo {

namespace streams {
inline constexpr std::uint64_t kMatrixValues = 1;
inline constexpr std::uint64_t kSparsifyOrder = 2;
inline constexpr std::uint64_t kWindowDraw = 3;
// SA read r is seeded from stream kAnnealRead + r.
inline constexpr std::uint64_t kAnnealRead = std::uint64_t{1} << 32;
}  // namespace streams

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream_id) {
    return splitmix64(splitmix64(seed) ^ splitmix64(stream_id + 0x632BE59BD9B4E019ULL));
}

class Rng {
public:
    Rng(std::uint64_t seed, std::uint64_t stream_id) : engine_(derive_seed(seed, stream_id)) {}

    std::uint64_t next() { return engine_(); }

    // Uniform on [0, 1) with 53 bits of resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer on [0, bound). bound must be > 0.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                    std::numeric_limits<std::uint64_t>::max() % bound;
        std::uint64_t r;
        do {
            r = engine_();
        } while (r >= limit);
        return r % bound;
    }

    // Fisher-Yates, highest index first.
    template <class T>
    void shuffle(std::span<T> items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::swap(items[i - 1], items[below(i)]);
        }
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace cqubo
