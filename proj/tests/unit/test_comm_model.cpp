#include "ehctrl/comm_model.hpp"
#include "ehctrl/errors.hpp"
#include "ehctrl/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace ehctrl;

TEST_CASE("channel draws are deterministic per seed") {
    ChannelConfig cfg;
    RandomStream a = StreamFactory(7).make(StreamId::channel, 0);
    RandomStream b = StreamFactory(7).make(StreamId::channel, 0);
    const auto x = draw_channels(cfg, 2, a);
    const auto y = draw_channels(cfg, 2, b);
    REQUIRE(x.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(x[i].h == y[i].h);
        CHECK(x[i].q == y[i].q);
        CHECK(x[i].q == cfg.decode(x[i].h));
    }
}

TEST_CASE("fading sample mean") {
    ChannelConfig cfg;
    RandomStream rng = StreamFactory(11).make(StreamId::channel, 0);
    double sum = 0.0;
    const int n = 100000;
    for (int k = 0; k < n; ++k) sum += draw_channels(cfg, 1, rng)[0].h;
    CHECK(std::abs(sum / n - 2.0) <= 0.05);
}

TEST_CASE("decoding curves are monotone and saturate") {
    for (const DecodingCurve& c : {DecodingCurve::exponential(1.0), DecodingCurve::logistic(2.0, 1.5)}) {
        double prev = c(0.0);
        CHECK(prev >= 0.0);
        CHECK(prev < 0.1);
        for (double h = 0.01; h < 30.0; h += 0.01) {
            const double v = c(h);
            CHECK(v >= prev);
            prev = v;
        }
        CHECK(prev == doctest::Approx(1.0).epsilon(1e-9));
    }
    CHECK(DecodingCurve::exponential(1.0)(0.0) == 0.0);
    CHECK(DecodingCurve::ideal()(0.0) == 1.0);
    CHECK(DecodingCurve::parse_kind("logistic") == DecodingCurve::Kind::logistic);
    CHECK_THROWS_AS(DecodingCurve::parse_kind("cubic"), ConfigError);
    CHECK_THROWS_AS(DecodingCurve::exponential(0.0), ConfigError);
}

TEST_CASE("resolve_slot basic cases") {
    ChannelConfig cfg;
    RandomStream rng(1);
    const std::vector<double> one{1.0};
    auto lone = resolve_slot(cfg, {true}, one, rng);
    CHECK(lone.links[0].gamma);
    CHECK_FALSE(lone.links[0].collided);

    cfg.collision_prob = 1.0;
    const std::vector<double> q{1.0, 1.0};
    auto both = resolve_slot(cfg, {true, true}, q, rng);
    CHECK(both.links[0].collided);
    CHECK(both.links[1].collided);
    CHECK_FALSE(both.links[0].gamma);
    CHECK_FALSE(both.links[1].gamma);

    auto quiet = resolve_slot(cfg, {false, true}, q, rng);
    CHECK_FALSE(quiet.links[0].gamma);
    CHECK_FALSE(quiet.links[0].transmitted);
    CHECK_FALSE(quiet.links[1].collided);
    CHECK(quiet.links[1].gamma);
}

TEST_CASE("outcome invariants over random slots") {
    ChannelConfig cfg;
    RandomStream rng(5);
    for (int k = 0; k < 20000; ++k) {
        std::vector<bool> tx{bernoulli(rng, 0.5), bernoulli(rng, 0.5), bernoulli(rng, 0.5)};
        const std::vector<double> q{uniform01(rng), uniform01(rng), uniform01(rng)};
        const auto out = resolve_slot(cfg, tx, q, rng);
        for (std::size_t i = 0; i < 3; ++i) {
            const auto& l = out.links[i];
            CHECK(l.gamma == (l.transmitted && !l.collided && l.decoded));
            bool others = false;
            for (std::size_t j = 0; j < 3; ++j) others = others || (j != i && tx[j]);
            if (!others) CHECK_FALSE(l.collided);
        }
    }
}

TEST_CASE("two saturated links succeed three quarters of the time") {
    ChannelConfig cfg;
    RandomStream rng = StreamFactory(3).make(StreamId::collision, 0);
    const std::vector<double> q{1.0, 1.0};
    int hits = 0;
    const int n = 100000;
    for (int k = 0; k < n; ++k) hits += resolve_slot(cfg, {true, true}, q, rng).links[0].gamma;
    CHECK(std::abs(hits / double(n) - 0.75) <= 0.01);
    CHECK(reception_probability(std::vector<double>{1.0, 1.0}, q, 0.25, 0) == 0.75);
    CHECK(reception_probability(std::vector<double>{0.0, 1.0}, q, 0.25, 0) == 0.0);
}

TEST_CASE("analytic reception probability matches Monte Carlo") {
    ChannelConfig cfg;
    const std::vector<double> z{0.4446, 0.3558};
    const int n = 200000;
    // E[q(h)] for h ~ Exp(mean 2), q = 1 - exp(-h): 1 - 1/(1 + 2) = 2/3
    const double mean_q = 2.0 / 3.0;
    const StreamFactory f(99);
    RandomStream ch = f.make(StreamId::channel, 0), tx = f.make(StreamId::transmission, 0);
    std::vector<RandomStream> col{f.make(StreamId::collision, 0), f.make(StreamId::collision, 1)};
    std::vector<RandomStream> dec{f.make(StreamId::decoding, 0), f.make(StreamId::decoding, 1)};
    std::vector<int> hits(2, 0);
    for (int k = 0; k < n; ++k) {
        const auto draws = draw_channels(cfg, 2, ch);
        const std::vector<double> q{draws[0].q, draws[1].q};
        const std::vector<bool> sent{bernoulli(tx, z[0]), bernoulli(tx, z[1])};
        const auto out = resolve_slot(cfg, sent, q, col, dec);
        hits[0] += out.links[0].gamma;
        hits[1] += out.links[1].gamma;
    }
    const std::vector<double> qbar{mean_q, mean_q};
    for (std::size_t i = 0; i < 2; ++i) {
        const double p = reception_probability(z, qbar, 0.25, i);
        const double sigma = std::sqrt(p * (1 - p) / n);
        CHECK(std::abs(hits[i] / double(n) - p) <= 3 * sigma);
    }
}

TEST_CASE("collision events do not depend on the node's own decode draw") {
    // the decode rate among clean packets is q, and collided packets are never decoded
    ChannelConfig cfg;
    cfg.collision_prob = 0.5;
    RandomStream rng(17);
    const std::vector<double> q{0.3, 1.0};
    int decoded_c = 0, collided = 0, decoded_nc = 0, clean = 0;
    for (int k = 0; k < 100000; ++k) {
        const auto o = resolve_slot(cfg, {true, true}, q, rng).links[0];
        if (o.collided) {
            ++collided;
            decoded_c += o.decoded;
        } else {
            ++clean;
            decoded_nc += o.decoded;
        }
    }
    CHECK(decoded_c == 0);
    CHECK(collided > 40000);
    CHECK(std::abs(decoded_nc / double(clean) - 0.3) < 0.015);
}

TEST_CASE("channel config validation") {
    ChannelConfig cfg;
    cfg.collision_prob = 1.5;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.collision_prob = 0.25;
    cfg.fading_mean = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
