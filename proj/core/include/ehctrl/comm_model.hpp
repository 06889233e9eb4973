#pragma once

#include "ehctrl/rng.hpp"

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace ehctrl {

/// Maps a channel state h >= 0 to a decoding probability in [0, 1].
class DecodingCurve {
public:
    enum class Kind {
        exponential,  ///< 1 - exp(-a h)
        logistic,     ///< 1 / (1 + exp(-a (h - b)))
        ideal,        ///< 1 for every h; a perfect link, used for idealised checks
    };

    static DecodingCurve exponential(double a = 1.0);
    static DecodingCurve logistic(double a, double b);
    static DecodingCurve ideal();

    /// Parses "exponential", "logistic" or "ideal".
    static Kind parse_kind(const std::string& name);
    static std::string kind_name(Kind kind);

    [[nodiscard]] double operator()(double h) const;

    [[nodiscard]] Kind kind() const noexcept { return kind_; }
    [[nodiscard]] double slope() const noexcept { return a_; }
    [[nodiscard]] double offset() const noexcept { return b_; }

private:
    DecodingCurve(Kind kind, double a, double b) : kind_(kind), a_(a), b_(b) {}

    Kind kind_;
    double a_;
    double b_;
};

/// Source of per-slot channel states.
class FadingSampler {
public:
    virtual ~FadingSampler() = default;
    virtual double sample(RandomStream& rng) const = 0;
    [[nodiscard]] virtual double mean() const = 0;
};

/// Rayleigh block fading power: h ~ Exp(mean), i.i.d. over slots.
class ExponentialFading final : public FadingSampler {
public:
    explicit ExponentialFading(double mean);
    double sample(RandomStream& rng) const override;
    [[nodiscard]] double mean() const override { return mean_; }

private:
    double mean_;
};

struct ChannelConfig {
    double fading_mean = 2.0;
    DecodingCurve decode = DecodingCurve::exponential(1.0);
    double collision_prob = 0.25;

    void validate() const;
};

struct ChannelDraw {
    double h = 0.0;
    double q = 0.0;
};

ChannelDraw draw_channel(const FadingSampler& fading, const DecodingCurve& decode,
                         RandomStream& rng);

/// M independent exponential channel draws from one stream.
std::vector<ChannelDraw> draw_channels(const ChannelConfig& config, std::size_t nodes,
                                       RandomStream& rng);

struct LinkOutcome {
    double h = 0.0;
    double q = 0.0;
    bool transmitted = false;
    bool collided = false;
    bool decoded = false;
    bool gamma = false;
};

struct SlotOutcome {
    std::vector<LinkOutcome> links;
};

/// Resolves collisions and decoding for one slot.
///
/// Every transmitting node i draws one Bernoulli(q_c) collision event per
/// other transmitting node; any firing event destroys the packet. A packet
/// that survives is decoded with probability q_i. Collision draws come from
/// `collision_rng[i]`, decode draws from `decode_rng[i]`.
SlotOutcome resolve_slot(const ChannelConfig& config, const std::vector<bool>& transmitted,
                         std::span<const double> q, std::span<RandomStream> collision_rng,
                         std::span<RandomStream> decode_rng);

/// Single-stream variant.
SlotOutcome resolve_slot(const ChannelConfig& config, const std::vector<bool>& transmitted,
                         std::span<const double> q, RandomStream& rng);

/// q_i z_i prod_{j != i} (1 - q_c z_j).
double reception_probability(std::span<const double> z, std::span<const double> q,
                             double collision_prob, std::size_t node);

}  // namespace ehctrl
