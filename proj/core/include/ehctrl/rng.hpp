#pragma once

#include <cstdint>
#include <random>

namespace ehctrl {

using RandomStream = std::mt19937_64;

/// Named randomness sources. Each (source, node) pair gets its own stream so
/// toggling one source never shifts the draws of another.
enum class StreamId : std::uint32_t {
    channel = 1,
    harvest = 2,
    transmission = 3,
    collision = 4,
    decoding = 5,
    availability = 6,
    noise = 7,
};

/// Expands one 64-bit root seed into independent named streams.
class StreamFactory {
public:
    explicit StreamFactory(std::uint64_t root_seed) : root_(root_seed) {}

    [[nodiscard]] RandomStream make(StreamId id, std::size_t node) const {
        std::seed_seq seq{static_cast<std::uint32_t>(root_ & 0xffffffffu),
                          static_cast<std::uint32_t>(root_ >> 32), static_cast<std::uint32_t>(id),
                          static_cast<std::uint32_t>(node), 0x9e3779b9u};
        return RandomStream(seq);
    }

    [[nodiscard]] std::uint64_t root() const noexcept { return root_; }

private:
    std::uint64_t root_;
};

/// Uniform draw on [0, 1).
inline double uniform01(RandomStream& rng) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

inline bool bernoulli(RandomStream& rng, double p) { return uniform01(rng) < p; }

}  // namespace ehctrl
