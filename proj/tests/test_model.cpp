#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "ce/generate.hpp"
#include "ce/model.hpp"

using ce::Entity;
using ce::Ranking;

namespace {

std::vector<Entity> worked_pair() {
    return {Entity("e1", 1.0, 0.4, 0.1), Entity("e2", 2.0, 0.3, 0.2)};
}

} // namespace

TEST_CASE("entity invariants are enforced at construction") {
    CHECK_NOTHROW(Entity("ok", 1.0, 0.4, 0.6));
    CHECK_NOTHROW(Entity("zero mass", 1.0, 0.0, 0.0));
    CHECK_THROWS_AS(Entity("mass", 1.0, 0.7, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(Entity("neg utility", -1.0, 0.5, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(Entity("click", 1.0, 1.5, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(Entity("abandon", 1.0, 0.0, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(Entity("nan", std::nan(""), 0.5, 0.1), std::invalid_argument);
}

TEST_CASE("ranking construction rejects non-permutations") {
    const auto entities = worked_pair();
    CHECK_THROWS_AS(Ranking(entities, {0, 0}), std::invalid_argument);
    CHECK_THROWS_AS(Ranking(entities, {0, 2}), std::invalid_argument);
    CHECK_THROWS_AS(Ranking(entities, {0}), std::invalid_argument);
}

TEST_CASE("view probability") {
    const auto entities = worked_pair();
    const Ranking ranking = Ranking::identity(entities);

    SUBCASE("top position is always viewed") { CHECK(ranking.view_probability(0) == 1.0); }

    SUBCASE("hand value below e1(C=0.4, gamma=0.1)") {
        CHECK(std::abs(ranking.view_probability(1) - 0.5) <= 1e-15);
    }

    SUBCASE("full absorption above blocks everything below") {
        const std::vector<Entity> wall = {Entity("wall", 1.0, 0.5, 0.5),
                                          Entity("below", 1.0, 0.9, 0.0)};
        CHECK(Ranking::identity(wall).view_probability(1) == 0.0);
    }

    SUBCASE("out of range position") {
        CHECK_THROWS_AS(ranking.view_probability(2), std::out_of_range);
    }
}

TEST_CASE("click probability") {
    const auto entities = worked_pair();
    const Ranking ranking = Ranking::identity(entities);

    CHECK(ranking.click_probability(0) == 0.4); // P_c = C at the top
    CHECK(std::abs(ranking.click_probability(1) - 0.15) <= 1e-15);

    const std::vector<Entity> unclickable = {Entity("first", 1.0, 0.2, 0.1),
                                             Entity("never", 3.0, 0.0, 0.3)};
    CHECK(Ranking::identity(unclickable).click_probability(1) == 0.0);
}

TEST_CASE("expected utility") {
    SUBCASE("single entity is U*C") {
        const std::vector<Entity> one = {Entity("e", 1.0, 0.5, 0.1)};
        CHECK(ce::expected_utility(Ranking::identity(one)).expected_utility == 0.5);
    }

    SUBCASE("worked two-entity value") {
        const auto report = ce::expected_utility(Ranking::identity(worked_pair()));
        CHECK(std::abs(report.expected_utility - 0.7) <= 1e-12);
        REQUIRE(report.per_position_contribution.size() == 2);
        CHECK(std::abs(report.per_position_contribution[0] - 0.4) <= 1e-15);
        CHECK(std::abs(report.per_position_contribution[1] - 0.3) <= 1e-15);
    }

    SUBCASE("zero utilities give zero") {
        const std::vector<Entity> dull = {Entity("a", 0.0, 0.4, 0.3), Entity("b", 0.0, 0.9, 0.1)};
        CHECK(ce::expected_utility(Ranking::identity(dull)).expected_utility == 0.0);
    }

    SUBCASE("report total equals the sum of contributions") {
        ce::SplitMix64 rng(11);
        for (int i = 0; i < 100; ++i) {
            const auto entities = ce::random_entities(rng, rng.next_in(1, 10));
            const auto report = ce::expected_utility(Ranking::identity(entities));
            double total = 0.0;
            for (double term : report.per_position_contribution) total += term;
            CHECK(std::abs(report.expected_utility - total) <= 1e-12);
        }
    }
}

TEST_CASE("zero absorption mass is legal and does not attenuate the list") {
    const std::vector<Entity> entities = {Entity("ghost", 5.0, 0.0, 0.0),
                                          Entity("real", 1.0, 0.6, 0.2)};
    const Ranking ranking = Ranking::identity(entities);
    CHECK(ranking.view_probability(1) == 1.0);
    CHECK(ce::expected_utility(ranking).per_position_contribution[0] == 0.0);
}

TEST_CASE("flow balance: click + abandon + exhaust mass sums to 1") {
    ce::SplitMix64 rng(29);
    for (int i = 0; i < 300; ++i) {
        const auto entities = ce::random_entities(rng, rng.next_in(1, 10));
        const Ranking ranking = Ranking::identity(entities);
        double mass = ranking.exhaust_probability();
        for (std::size_t pos = 0; pos < ranking.size(); ++pos) {
            mass += ranking.click_probability(pos);
            mass += (ranking.absorption_at(pos) - ranking.click_prob_at(pos))
                    * ranking.view_probability(pos);
        }
        CHECK(std::abs(mass - 1.0) <= 1e-12);
    }
}

TEST_CASE("expected utility is invariant under permuting identical entities") {
    const std::vector<Entity> entities = {Entity("a", 2.0, 0.3, 0.2), Entity("b", 2.0, 0.3, 0.2),
                                          Entity("c", 1.0, 0.5, 0.1)};
    const double base = ce::expected_utility(entities, {0, 1, 2}).expected_utility;
    CHECK(ce::expected_utility(entities, {1, 0, 2}).expected_utility == base);
}

TEST_CASE("scaling all utilities scales expected utility") {
    ce::SplitMix64 rng(83);
    for (int i = 0; i < 50; ++i) {
        const auto entities = ce::random_entities(rng, rng.next_in(1, 8));
        const double base = ce::expected_utility(Ranking::identity(entities)).expected_utility;

        const auto scaled_by = [&](double lambda) {
            std::vector<Entity> scaled;
            for (const Entity& e : entities)
                scaled.emplace_back(e.id, lambda * e.utility, e.click_prob, e.abandon_prob);
            return ce::expected_utility(Ranking::identity(scaled)).expected_utility;
        };

        // Powers of two scale each term exactly.
        CHECK(scaled_by(4.0) == 4.0 * base);
        CHECK(scaled_by(0.5) == 0.5 * base);
        const double lambda = rng.next_double(0.1, 9.0);
        CHECK(std::abs(scaled_by(lambda) - lambda * base) <= 1e-12 * (1.0 + lambda * base));
    }
}

TEST_CASE("view probability recurrence") {
    ce::SplitMix64 rng(7);
    for (int i = 0; i < 50; ++i) {
        const auto entities = ce::random_entities(rng, rng.next_in(2, 10));
        const Ranking ranking = Ranking::identity(entities);
        for (std::size_t pos = 0; pos + 1 < ranking.size(); ++pos)
            CHECK(ranking.view_probability(pos + 1)
                  == ranking.view_probability(pos) * (1.0 - ranking.absorption_at(pos)));
    }
}
