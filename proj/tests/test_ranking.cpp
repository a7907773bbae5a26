#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "ce/generate.hpp"
#include "ce/ranking.hpp"

using ce::Entity;
using ce::RankingVariant;

TEST_CASE("ce score") {
    CHECK(std::abs(ce::ce_score(Entity("a", 1.0, 0.4, 0.1)) - 0.8) <= 1e-15);
    CHECK(std::abs(ce::ce_score(Entity("b", 5.0, 0.3, 0.0)) - 5.0) <= 1e-12); // gamma=0: CE = U
    CHECK(ce::ce_score(Entity("c", 7.0, 0.0, 0.2)) == 0.0);
    CHECK(ce::ce_score(Entity("d", 7.0, 0.0, 0.0)) == 0.0); // zero absorption mass
}

TEST_CASE("rank_by_ce") {
    SUBCASE("worked pair: higher CE goes on top") {
        const std::vector<Entity> entities = {Entity("A", 1.0, 0.4, 0.1),
                                              Entity("B", 2.0, 0.3, 0.2)};
        const auto ranking = ce::rank_by_ce(entities);
        CHECK(ranking.order() == std::vector<std::size_t>{1, 0});

        // Exhaustive check over both orders agrees and prefers [B, A].
        const auto best = ce::brute_force_optimal(entities);
        CHECK(best.order == std::vector<std::size_t>{1, 0});
        CHECK(std::abs(best.value - 0.8) <= 1e-12);
        CHECK(std::abs(ce::expected_utility(entities, {0, 1}).expected_utility - 0.7) <= 1e-12);
    }

    SUBCASE("identical entities keep input order") {
        const std::vector<Entity> entities = {Entity("x", 1.0, 0.3, 0.1),
                                              Entity("y", 1.0, 0.3, 0.1),
                                              Entity("z", 1.0, 0.3, 0.1)};
        CHECK(ce::rank_by_ce(entities).order() == std::vector<std::size_t>{0, 1, 2});
    }

    SUBCASE("gamma = 0 reduces to sorting by utility") {
        ce::SplitMix64 rng(17);
        ce::ParameterRanges ranges;
        ranges.abandon_fraction_hi = 0.0;
        for (int i = 0; i < 100; ++i) {
            const auto entities = ce::random_entities(rng, rng.next_in(2, 8), ranges);
            const auto ce_scores = ce::variant_scores(entities, RankingVariant::ce);
            const auto prp_scores = ce::variant_scores(entities, RankingVariant::prp);
            CHECK(ce::same_order_modulo_ties(ce_scores, prp_scores));
        }
    }

    SUBCASE("empty input is rejected") {
        CHECK_THROWS_AS(ce::rank_by_ce(std::vector<Entity>{}), std::invalid_argument);
    }
}

TEST_CASE("ranking variants") {
    SUBCASE("prp sorts by utility") {
        const std::vector<Entity> entities = {Entity("lo", 0.2, 0.5, 0.1),
                                              Entity("hi", 0.9, 0.5, 0.1)};
        CHECK(ce::rank_by_variant(entities, RankingVariant::prp).order()
              == std::vector<std::size_t>{1, 0});
    }

    SUBCASE("abandonment-aware ranking can invert the relevance order") {
        // Scores 0.81/1.5 = 0.54 vs 0.64/0.9 = 0.711..: the less relevant
        // entity wins because it bleeds less abandonment mass.
        const std::vector<Entity> entities = {Entity("sticky", 0.9, 0.3, 0.6),
                                              Entity("gentle", 0.8, 0.3, 0.1)};
        const double s0 = ce::variant_score(entities[0], RankingVariant::abandonment_aware);
        const double s1 = ce::variant_score(entities[1], RankingVariant::abandonment_aware);
        CHECK(std::abs(s0 - 0.54) <= 1e-12);
        CHECK(std::abs(s1 - 0.64 / 0.9) <= 1e-12);
        CHECK(ce::rank_by_variant(entities, RankingVariant::abandonment_aware).order()
              == std::vector<std::size_t>{1, 0});
    }

    SUBCASE("r2_over_k requires k") {
        const std::vector<Entity> entities = {Entity("a", 0.4, 0.4, 0.1)};
        CHECK_THROWS_AS(ce::rank_by_variant(entities, RankingVariant::relevance_squared_over_k),
                        std::invalid_argument);
        CHECK_NOTHROW(
            ce::rank_by_variant(entities, RankingVariant::relevance_squared_over_k, 0.9));
        CHECK_THROWS_AS(
            ce::rank_by_variant(entities, RankingVariant::relevance_squared_over_k, 1.5),
            std::invalid_argument);
    }

    SUBCASE("gamma = k - C makes CE agree with the C*U order") {
        ce::SplitMix64 rng(41);
        const double k = 0.9;
        for (int i = 0; i < 100; ++i) {
            std::vector<Entity> entities;
            const std::size_t n = rng.next_in(2, 8);
            for (std::size_t j = 0; j < n; ++j) {
                const double c = rng.next_double(0.05, k);
                entities.emplace_back("e" + std::to_string(j), rng.next_double(0.1, 5.0), c,
                                      k - c);
            }
            const auto ce_scores = ce::variant_scores(entities, RankingVariant::ce);
            const auto cu_scores =
                ce::variant_scores(entities, RankingVariant::perceived_times_actual);
            CHECK(ce::same_order_modulo_ties(ce_scores, cu_scores));
        }
    }

    SUBCASE("positive utility scaling never changes a variant order") {
        ce::SplitMix64 rng(59);
        for (RankingVariant variant :
             {RankingVariant::ce, RankingVariant::prp, RankingVariant::perceived_times_actual,
              RankingVariant::abandonment_aware, RankingVariant::expected_profit,
              RankingVariant::social_optimal}) {
            const auto entities = ce::random_entities(rng, 6);
            std::vector<Entity> scaled;
            for (const Entity& e : entities)
                scaled.emplace_back(e.id, 2.0 * e.utility, e.click_prob, e.abandon_prob);
            CHECK(ce::rank_by_variant(entities, variant).order()
                  == ce::rank_by_variant(scaled, variant).order());
        }
    }
}

TEST_CASE("brute force oracle") {
    SUBCASE("single entity") {
        const std::vector<Entity> one = {Entity("e", 1.0, 0.5, 0.1)};
        const auto best = ce::brute_force_optimal(one);
        CHECK(best.order == std::vector<std::size_t>{0});
        CHECK(best.value == 0.5);
    }

    SUBCASE("size guard") {
        ce::SplitMix64 rng(3);
        const auto entities = ce::random_entities(rng, 11);
        CHECK_THROWS_AS(ce::brute_force_optimal(entities), std::length_error);
    }

    SUBCASE("CE ranking attains the brute-force maximum") {
        ce::SplitMix64 rng(101);
        for (int i = 0; i < 300; ++i) {
            const auto entities = ce::random_entities(rng, rng.next_in(2, 8));
            const auto best = ce::brute_force_optimal(entities);
            const double by_ce = ce::expected_utility(ce::rank_by_ce(entities)).expected_utility;
            CHECK(std::abs(by_ce - best.value) <= 1e-12);
        }
    }
}

TEST_CASE("adjacent swaps out of CE order never help") {
    ce::SplitMix64 rng(211);
    for (int i = 0; i < 200; ++i) {
        const auto entities = ce::random_entities(rng, rng.next_in(2, 8));
        auto order = ce::rank_by_ce(entities).order();
        const double base = ce::expected_utility(entities, order).expected_utility;
        for (std::size_t pos = 0; pos + 1 < order.size(); ++pos) {
            auto swapped = order;
            std::swap(swapped[pos], swapped[pos + 1]);
            CHECK(ce::expected_utility(entities, swapped).expected_utility <= base + 1e-12);
        }
    }
}
