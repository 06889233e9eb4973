#include "ehctrl/comm_model.hpp"

#include "ehctrl/errors.hpp"

#include <cmath>
#include <random>

namespace ehctrl {

DecodingCurve DecodingCurve::exponential(double a) {
    if (!(a > 0.0) || !std::isfinite(a)) throw ConfigError("decoding slope must be positive");
    return {Kind::exponential, a, 0.0};
}

DecodingCurve DecodingCurve::logistic(double a, double b) {
    if (!(a > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
        throw ConfigError("logistic decoding curve needs a positive slope and finite offset");
    }
    return {Kind::logistic, a, b};
}

DecodingCurve DecodingCurve::ideal() { return {Kind::ideal, 0.0, 0.0}; }

DecodingCurve::Kind DecodingCurve::parse_kind(const std::string& name) {
    if (name == "exponential") return Kind::exponential;
    if (name == "logistic") return Kind::logistic;
    if (name == "ideal") return Kind::ideal;
    throw ConfigError("unknown decoding curve '" + name + "'");
}

std::string DecodingCurve::kind_name(Kind kind) {
    switch (kind) {
        case Kind::exponential: return "exponential";
        case Kind::logistic: return "logistic";
        case Kind::ideal: return "ideal";
    }
    return "unknown";
}

double DecodingCurve::operator()(double h) const {
    h = std::max(h, 0.0);
    switch (kind_) {
        case Kind::exponential: return -std::expm1(-a_ * h);
        case Kind::logistic: return 1.0 / (1.0 + std::exp(-a_ * (h - b_)));
        case Kind::ideal: return 1.0;
    }
    return 0.0;
}

ExponentialFading::ExponentialFading(double mean) : mean_(mean) {
    if (!(mean > 0.0) || !std::isfinite(mean)) throw ConfigError("fading mean must be positive");
}

double ExponentialFading::sample(RandomStream& rng) const {
    return std::exponential_distribution<double>(1.0 / mean_)(rng);
}

void ChannelConfig::validate() const {
    if (!(fading_mean > 0.0) || !std::isfinite(fading_mean)) {
        throw ConfigError("fading mean must be positive");
    }
    if (!(collision_prob >= 0.0 && collision_prob <= 1.0)) {
        throw ConfigError("collision probability must lie in [0, 1]");
    }
}

ChannelDraw draw_channel(const FadingSampler& fading, const DecodingCurve& decode,
                         RandomStream& rng) {
    const double h = fading.sample(rng);
    return {h, decode(h)};
}

std::vector<ChannelDraw> draw_channels(const ChannelConfig& config, std::size_t nodes,
                                       RandomStream& rng) {
    config.validate();
    const ExponentialFading fading(config.fading_mean);
    std::vector<ChannelDraw> out;
    out.reserve(nodes);
    for (std::size_t i = 0; i < nodes; ++i) out.push_back(draw_channel(fading, config.decode, rng));
    return out;
}

namespace {

template <typename CollisionRng, typename DecodeRng>
SlotOutcome resolve(const ChannelConfig& config, const std::vector<bool>& transmitted,
                    std::span<const double> q, CollisionRng&& collision_rng,
                    DecodeRng&& decode_rng) {
    const std::size_t m = transmitted.size();
    if (q.size() != m) throw ConfigError("resolve_slot: transmitted and q lengths differ");

    SlotOutcome out;
    out.links.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        LinkOutcome& link = out.links[i];
        link.q = q[i];
        link.transmitted = transmitted[i];
        if (!link.transmitted) continue;

        // draw every pair event, so stream consumption depends only on who transmitted
        for (std::size_t j = 0; j < m; ++j) {
            if (j == i || !transmitted[j]) continue;
            if (bernoulli(collision_rng(i), config.collision_prob)) link.collided = true;
        }
        const bool decoded = bernoulli(decode_rng(i), q[i]);
        link.decoded = !link.collided && decoded;
        link.gamma = link.decoded;
    }
    return out;
}

}  // namespace

SlotOutcome resolve_slot(const ChannelConfig& config, const std::vector<bool>& transmitted,
                         std::span<const double> q, std::span<RandomStream> collision_rng,
                         std::span<RandomStream> decode_rng) {
    if (collision_rng.size() != transmitted.size() || decode_rng.size() != transmitted.size()) {
        throw ConfigError("resolve_slot: one collision and one decode stream per node required");
    }
    return resolve(
        config, transmitted, q, [&](std::size_t i) -> RandomStream& { return collision_rng[i]; },
        [&](std::size_t i) -> RandomStream& { return decode_rng[i]; });
}

SlotOutcome resolve_slot(const ChannelConfig& config, const std::vector<bool>& transmitted,
                         std::span<const double> q, RandomStream& rng) {
    auto same = [&](std::size_t) -> RandomStream& { return rng; };
    return resolve(config, transmitted, q, same, same);
}

double reception_probability(std::span<const double> z, std::span<const double> q,
                             double collision_prob, std::size_t node) {
    double p = q[node] * z[node];
    for (std::size_t j = 0; j < z.size(); ++j) {
        if (j != node) p *= 1.0 - collision_prob * z[j];
    }
    return p;
}

}  // namespace ehctrl
