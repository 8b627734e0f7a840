#include <catch2/catch_amalgamated.hpp>

#include "sedfc/belief.hpp"
#include "sedfc/sed_encoder.hpp"
#include "test_helpers.hpp"

using namespace sedfc;
using Catch::Matchers::WithinAbs;

TEST_CASE("init_belief") {
    const auto b = init_belief(4);
    CHECK(b.t == 0);
    for (double r : b.rho) CHECK(r == 0.25);

    CHECK(init_belief(1).rho == std::vector<double>{1.0});
    CHECK_THROWS_AS(init_belief(0), std::invalid_argument);

    const auto big = init_belief(std::size_t{1} << 20);
    CHECK_THAT(pairwise_sum(big.rho), WithinAbs(1.0, 1e-9));
}

TEST_CASE("bayes update") {
    const auto bsc = regularize(0.11, 0.11);

    SECTION("two messages, y = 0") {
        const auto b = init_belief(2);
        const auto part = make_partition(b, {0}, {1});
        const auto b2 = bayes_update(b, part, 0, bsc);
        CHECK(b2.t == 1);
        CHECK_THAT(b2.rho[0], WithinAbs(0.89, 1e-12));
        CHECK_THAT(b2.rho[1], WithinAbs(0.11, 1e-12));
    }
    SECTION("noiseless limit annihilates the inconsistent side") {
        const ChannelSpec spec{1e-12, 1e-12, Relabel::none};
        const auto b = init_belief(4);
        const auto part = make_partition(b, {0, 1}, {2, 3});
        const auto b2 = bayes_update(b, part, 0, spec);
        CHECK(b2.rho[2] < 1e-11);
        CHECK(b2.rho[3] < 1e-11);
        CHECK_THAT(b2.rho[0] + b2.rho[1], WithinAbs(1.0, 1e-9));
    }
    SECTION("posterior ratio equals the likelihood ratio") {
        const auto b = init_belief(4);
        const auto part = make_partition(b, {0, 1}, {2, 3});
        const auto b2 = bayes_update(b, part, 0, bsc);
        CHECK_THAT(b2.rho[0] / b2.rho[2], WithinAbs(0.89 / 0.11, 1e-12));
        CHECK_THAT(pairwise_sum(b2.rho), WithinAbs(1.0, 1e-12));
    }
    SECTION("conservation and positivity over random trajectories") {
        SplitMix64 rng(5);
        for (int rep = 0; rep < 50; ++rep) {
            const auto spec = sedfc::testing::random_regularized_channel(rng);
            const auto stats = channel_stats(spec);
            auto b = sedfc::testing::random_belief(rng, 2 + rng.next_below(63));
            const auto cfg = make_encoder_config(stats);
            for (int step = 0; step < 40; ++step) {
                const auto part = encode_step(b, cfg);
                b = bayes_update(b, part, static_cast<int>(rng.next_below(2)), spec);
                for (double r : b.rho) CHECK(r > 0.0);
                CHECK_THAT(pairwise_sum(b.rho), WithinAbs(1.0, 1e-9));
            }
        }
    }
}

TEST_CASE("llr") {
    CHECK(llr(0.5) == 0.0);
    CHECK_THAT(llr(1.0 / 2), WithinAbs(0.0, 0.0));
    CHECK_THAT(llr(1.0 / 1024), WithinAbs(-std::log2(1023.0), 1e-12));
    // stopping threshold at epsilon = 1e-3
    CHECK_THAT(llr(0.999), WithinAbs(9.96434086779, 1e-9));
    CHECK(std::isinf(llr(0.0)));
    CHECK(std::isinf(llr(1.0)));

    bool sat = false;
    CHECK_THAT(llr_clamped(0.7, sat), WithinAbs(llr(0.7), 0.0));
    CHECK_FALSE(sat);
    llr_clamped(1.0, sat);
    CHECK(sat);
    llr_clamped(0.0, sat);
    CHECK(sat);
}

TEST_CASE("extrinsic probabilities") {
    SECTION("exclusive assignment zeroes the own-symbol mass") {
        BeliefState b;
        b.rho = {0.7, 0.2, 0.1};
        const auto part = make_partition(b, {1, 2}, {0});
        const auto [own, other] = extrinsic_probs(b, part, 0);
        CHECK(own == 0.0);
        CHECK_THAT(other, WithinAbs(1.0, 1e-12));
    }
    SECTION("uniform four-message example") {
        const auto b = init_belief(4);
        const auto part = make_partition(b, {0, 1}, {2, 3});
        const auto [own, other] = extrinsic_probs(b, part, 0);
        CHECK_THAT(own, WithinAbs(1.0 / 3.0, 1e-12));
        CHECK_THAT(other, WithinAbs(2.0 / 3.0, 1e-12));
    }
    SECTION("the pair always sums to 1") {
        SplitMix64 rng(17);
        for (int rep = 0; rep < 500; ++rep) {
            const auto spec = sedfc::testing::random_regularized_channel(rng);
            const auto stats = channel_stats(spec);
            const auto b =
                sedfc::testing::random_communication_belief(rng, stats.pi1_star);
            const auto part = sed_partition_greedy(b, stats.lambda);
            const auto i = static_cast<std::uint32_t>(rng.next_below(b.size()));
            const auto [own, other] = extrinsic_probs(b, part, i);
            CHECK_THAT(own + other, WithinAbs(1.0, 1e-12));
        }
    }
    CHECK_THROWS_AS(extrinsic_probs(init_belief(1), make_partition(init_belief(1), {}, {0}), 0),
                    std::domain_error);
}

TEST_CASE("expected drift") {
    const auto bsc = regularize(0.11, 0.11);
    const auto stats = channel_stats(bsc);

    SECTION("confirmation assignment drifts at exactly C1") {
        BeliefState b;
        b.rho = {0.6, 0.25, 0.15};
        const auto part = make_partition(b, {1, 2}, {0});
        CHECK_THAT(expected_drift(b, part, 0, bsc), WithinAbs(stats.C1, 1e-12));
    }
    SECTION("two-message split: hand-evaluated KL against the opposite conditional") {
        const auto b = init_belief(2);
        const auto part = make_partition(b, {0}, {1});
        // extrinsic mixture for message 0 collapses onto P(.|X=1)
        const double expected = kl_divergence({0.89, 0.11}, {0.11, 0.89});
        CHECK_THAT(expected_drift(b, part, 0, bsc), WithinAbs(expected, 1e-14));
        CHECK_THAT(expected_drift(b, part, 0, bsc), WithinAbs(stats.C1, 1e-12));
        CHECK(expected_drift(b, part, 0, bsc) >= stats.C - 1e-12);
    }
    SECTION("SED partitions keep the drift at least C for every message") {
        SplitMix64 rng(23);
        for (int rep = 0; rep < 300; ++rep) {
            const auto spec = sedfc::testing::random_regularized_channel(rng);
            const auto s = channel_stats(spec);
            const auto b = sedfc::testing::random_communication_belief(rng, s.pi1_star);
            const auto part = sed_partition_greedy(b, s.lambda);
            for (std::uint32_t i = 0; i < b.size(); ++i)
                CHECK(expected_drift(b, part, i, spec) >= s.C - 1e-12);
        }
    }
}

TEST_CASE("max step bound") {
    CHECK_THAT(max_step(regularize(0.11, 0.11)), WithinAbs(3.0163, 5e-4));
    CHECK_THAT(max_step(regularize(0.03, 0.22)), WithinAbs(4.7, 5e-4));
    CHECK(max_step(regularize(0.4999, 0.4999)) < 1e-3);

    SECTION("one-step LLR changes are bounded by C2") {
        SplitMix64 rng(31);
        for (int rep = 0; rep < 200; ++rep) {
            const auto spec = sedfc::testing::random_regularized_channel(rng);
            const auto s = channel_stats(spec);
            const auto b = sedfc::testing::random_communication_belief(rng, s.pi1_star);
            const auto part = sed_partition_greedy(b, s.lambda);
            for (int y = 0; y < 2; ++y) {
                const auto b2 = bayes_update(b, part, y, spec);
                for (std::uint32_t i = 0; i < b.size(); ++i)
                    CHECK(std::abs(llr(b2.rho[i]) - llr(b.rho[i])) <= s.C2 + 1e-9);
            }
        }
    }
}

TEST_CASE("partition mass caching") {
    SplitMix64 rng(37);
    for (int rep = 0; rep < 300; ++rep) {
        const auto spec = sedfc::testing::random_regularized_channel(rng);
        const auto s = channel_stats(spec);
        const auto b = sedfc::testing::random_communication_belief(rng, s.pi1_star);
        for (const auto& part : {sed_partition_greedy(b, s.lambda),
                                 sed_partition_original(b, s.lambda)}) {
            std::vector<double> m0, m1;
            for (auto i : part.s0) m0.push_back(b.rho[i]);
            for (auto i : part.s1) m1.push_back(b.rho[i]);
            CHECK_THAT(part.pi0, WithinAbs(pairwise_sum(m0), 1e-12));
            CHECK_THAT(part.pi1, WithinAbs(pairwise_sum(m1), 1e-12));
            CHECK_THAT(part.pi0 + part.pi1, WithinAbs(1.0, 1e-9));
        }
    }
}
