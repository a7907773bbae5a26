#include "doctest.h"

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "ce/equilibrium.hpp"
#include "ce/generate.hpp"

using ce::Advertiser;
using ce::BidVector;

namespace {

std::vector<Advertiser> worked_ads() {
    return {Advertiser("a1", 10.0, 0.5, 0.5), Advertiser("a2", 4.0, 0.3, 0.3)};
}

} // namespace

TEST_CASE("equilibrium bids") {
    SUBCASE("bottom ad bids v * mu") {
        const std::vector<Advertiser> one = {Advertiser("solo", 4.0, 0.3, 0.3)};
        CHECK(std::abs(ce::equilibrium_bids(one)[0] - 2.4) <= 1e-15);
    }

    SUBCASE("worked two-ad instance: bids (10, 2.4)") {
        // For a1, mu = 1 kills the carry term, so b1 = v1 = 10.
        const auto bids = ce::equilibrium_bids(worked_ads());
        CHECK(std::abs(bids[0] - 10.0) <= 1e-12);
        CHECK(std::abs(bids[1] - 2.4) <= 1e-15);
    }

    SUBCASE("gamma = 0 reduces to the Overture equilibrium recursion") {
        ce::SplitMix64 rng(701);
        ce::ParameterRanges ranges;
        ranges.abandon_fraction_hi = 0.0;
        for (int i = 0; i < 100; ++i) {
            const std::size_t n = rng.next_in(2, 8);
            const auto ads = ce::random_advertisers(rng, n, ranges);
            const auto bids = ce::equilibrium_bids(ads);

            // Recover the allocation so the recursion runs bottom-up.
            const auto outcome = ce::run_ce_auction(ads, bids);
            double bid_below = 0.0;
            for (std::size_t pos = n; pos-- > 0;) {
                const Advertiser& a = ads[outcome.allocation[pos]];
                const double expected = a.value * a.ctr + (1.0 - a.ctr) * bid_below;
                CHECK(std::abs(bids[outcome.allocation[pos]] - expected) <= 1e-12);
                bid_below = bids[outcome.allocation[pos]];
            }
        }
    }

    SUBCASE("gamma = k - c reduces to the GSP equilibrium recursion") {
        ce::SplitMix64 rng(702);
        const double k = 0.7;
        for (int i = 0; i < 100; ++i) {
            const std::size_t n = rng.next_in(2, 8);
            std::vector<Advertiser> ads;
            for (std::size_t j = 0; j < n; ++j) {
                const double c = rng.next_double(0.05, k);
                ads.emplace_back("a" + std::to_string(j), rng.next_double(0.5, 10.0), c, k - c);
            }
            const auto bids = ce::equilibrium_bids(ads);
            const auto outcome = ce::run_ce_auction(ads, bids);
            double carry = 0.0; // b_{i+1} c_{i+1} / k
            for (std::size_t pos = n; pos-- > 0;) {
                const Advertiser& a = ads[outcome.allocation[pos]];
                const double expected = k / a.ctr * (a.value * a.ctr + (1.0 - k) * carry);
                CHECK(std::abs(bids[outcome.allocation[pos]] - expected) <= 1e-12);
                carry = bids[outcome.allocation[pos]] * a.ctr / k;
            }
        }
    }

    SUBCASE("step-1 order property: weighted bids descend and sit inside the convex bounds") {
        ce::SplitMix64 rng(703);
        for (int i = 0; i < 200; ++i) {
            const std::size_t n = rng.next_in(2, 8);
            const auto ads = ce::random_advertisers(rng, n);
            const auto bids = ce::equilibrium_bids(ads);
            const auto outcome = ce::run_ce_auction(ads, bids);

            // The pricing order the bids induce is the assumed v*c/mu order.
            std::vector<double> value_scores(n);
            for (std::size_t adv = 0; adv < n; ++adv)
                value_scores[adv] = ads[adv].value * ads[adv].ctr / ce::absorption(ads[adv]);
            CHECK(outcome.allocation == ce::argsort_descending(value_scores));
            for (std::size_t pos = 0; pos < n; ++pos) {
                const Advertiser& a = ads[outcome.allocation[pos]];
                const double wb = outcome.rank_scores[pos];
                const double value_score = a.value * a.ctr / ce::absorption(a);
                const double wb_below = pos + 1 < n ? outcome.rank_scores[pos + 1] : 0.0;
                CHECK(wb >= wb_below - 1e-12);
                CHECK(wb <= value_score + 1e-9);
                CHECK(wb >= std::min(wb_below, value_score) - 1e-9);
            }
        }
    }
}

TEST_CASE("deviation profits") {
    ce::SplitMix64 rng(711);
    const auto ads = ce::random_advertisers(rng, 5);
    const auto bids = ce::equilibrium_bids(ads);
    const auto outcome = ce::run_ce_auction(ads, bids);

    SUBCASE("null deviation reproduces the current profit exactly") {
        for (std::size_t pos = 0; pos < ads.size(); ++pos) {
            const std::size_t adv = outcome.allocation[pos];
            CHECK(ce::deviation_profit(ads, bids, adv, pos)
                  == outcome.advertiser_profits[adv]);
        }
    }

    SUBCASE("dropping out earns nothing") {
        CHECK(ce::deviation_profit(ads, bids, 0, std::nullopt) == 0.0);
    }

    SUBCASE("bad indices are rejected") {
        CHECK_THROWS_AS(ce::deviation_profit(ads, bids, 99, 0), std::out_of_range);
        CHECK_THROWS_AS(ce::deviation_profit(ads, bids, 0, 99), std::out_of_range);
    }

    SUBCASE("exhaustive deviations cannot beat equilibrium") {
        for (std::size_t adv = 0; adv < ads.size(); ++adv) {
            const double current = outcome.advertiser_profits[adv];
            for (std::size_t m = 0; m < ads.size(); ++m)
                CHECK(ce::deviation_profit(ads, bids, adv, m) <= current + 1e-9);
        }
    }
}

TEST_CASE("price rises monotonically on unilateral move-up") {
    ce::SplitMix64 rng(723);
    for (int i = 0; i < 100; ++i) {
        const std::size_t n = rng.next_in(2, 8);
        const auto ads = ce::random_advertisers(rng, n);
        const auto bids = ce::random_bids(rng, n);
        for (std::size_t adv = 0; adv < n; ++adv) {
            double price_below = ce::deviation_price(ads, bids, adv, n - 1);
            for (std::size_t m = n - 1; m-- > 0;) {
                const double price = ce::deviation_price(ads, bids, adv, m);
                CHECK(price >= price_below - 1e-12);
                price_below = price;
            }
        }
    }
}

TEST_CASE("equilibrium verification") {
    SUBCASE("computed bids verify envy-free on random instances") {
        ce::SplitMix64 rng(731);
        for (int i = 0; i < 200; ++i) {
            const std::size_t n = rng.next_in(1, 8);
            const auto ads = ce::random_advertisers(rng, n);
            const auto report = ce::verify_equilibrium(ads, ce::equilibrium_bids(ads), 1e-9);
            CHECK(report.is_envy_free);
            CHECK(report.worst_violation <= 1e-9);
            // Social optimality at equilibrium.
            const auto outcome = ce::run_ce_auction(ads, ce::equilibrium_bids(ads));
            CHECK(std::abs(outcome.total_revenue - report.social_revenue) <= 1e-12);
            // Individual rationality against private values.
            for (std::size_t pos = 0; pos < n; ++pos)
                CHECK(outcome.prices[pos] <= ads[outcome.allocation[pos]].value + 1e-12);
        }
    }

    SUBCASE("an overbid that swaps materially different ads breaks envy-freeness") {
        const auto ads = worked_ads();
        // a2 overbids enough to take the top spot; it then pays w1 b1 / w2
        // = 10 per click against a private value of 4.
        const auto report = ce::verify_equilibrium(ads, BidVector({10.0, 25.0}), 1e-9);
        CHECK(!report.is_envy_free);
        CHECK(report.worst_violation > 1e-6);
    }

    SUBCASE("a single advertiser is always envy-free") {
        const std::vector<Advertiser> one = {Advertiser("solo", 4.0, 0.3, 0.3)};
        CHECK(ce::verify_equilibrium(one, BidVector({123.0}), 1e-9).is_envy_free);
    }
}

TEST_CASE("vcg revenue equivalence at equilibrium") {
    SUBCASE("worked instance: both top prices are 2.4 and revenues match") {
        const auto ads = worked_ads();
        const auto eq = ce::vcg_equivalence_check(ads);
        REQUIRE(eq.ce_prices.size() == 2);
        CHECK(std::abs(eq.ce_prices[0] - 2.4) <= 1e-12);
        CHECK(std::abs(eq.vcg_prices[0] - 2.4) <= 1e-12);
        CHECK(eq.ce_prices[1] == 0.0);
        CHECK(eq.vcg_prices[1] == 0.0);
        CHECK(eq.max_abs_gap <= 1e-12);

        const auto report = ce::verify_equilibrium(ads, ce::equilibrium_bids(ads), 1e-9);
        CHECK(std::abs(report.se_revenue - report.vcg_truthful_revenue) <= 1e-12);
        CHECK(std::abs(report.se_revenue - 1.2) <= 1e-12);
    }

    SUBCASE("per-position equivalence on random instances") {
        ce::SplitMix64 rng(741);
        for (int i = 0; i < 200; ++i) {
            const auto ads = ce::random_advertisers(rng, rng.next_in(1, 8));
            CHECK(ce::vcg_equivalence_check(ads).max_abs_gap <= 1e-9);
        }
    }
}
