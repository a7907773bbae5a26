#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "ce/auction.hpp"

// The envy-free pure-strategy equilibrium of the CE mechanism: closed-form
// bids computed bottom-up, and an exhaustive verifier that lets every
// advertiser try every other position (and dropping out) at the price it
// would actually pay there. Profits are piecewise-constant in the bid
// between position boundaries, so enumerating positions covers all
// unilateral bid changes.

namespace ce {

/// Bids making the descending v*c/mu order an envy-free equilibrium:
/// from the bottom up, b_i = (mu_i/c_i) [ v_i c_i + (1-mu_i) w_{i+1} b_{i+1} ].
/// Returned in input-advertiser order. Advertisers that can never be
/// clicked bid 0.
inline BidVector equilibrium_bids(std::span<const Advertiser> ads) {
    if (ads.empty()) throw std::invalid_argument("equilibrium: advertiser list is empty");
    const std::size_t n = ads.size();
    std::vector<double> score(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Advertiser& a = ads[i];
        score[i] = a.ctr == 0.0 ? 0.0 : a.value * a.ctr / absorption(a);
    }
    const std::vector<std::size_t> order = argsort_descending(score);

    std::vector<double> bids(n, 0.0);
    double weighted_bid_below = 0.0; // w_{i+1} b_{i+1}
    for (std::size_t pos = n; pos-- > 0;) {
        const Advertiser& a = ads[order[pos]];
        if (a.ctr == 0.0) {
            weighted_bid_below = 0.0;
            continue;
        }
        const double mu = absorption(a);
        const double bid = mu / a.ctr * (a.value * a.ctr + (1.0 - mu) * weighted_bid_below);
        bids[order[pos]] = bid;
        weighted_bid_below = pricing_weight(a) * bid;
    }
    return BidVector(std::move(bids));
}

namespace detail {

inline std::vector<std::size_t> pricing_order(std::span<const Advertiser> ads,
                                              const BidVector& bids) {
    std::vector<double> scores(ads.size());
    for (std::size_t i = 0; i < ads.size(); ++i) scores[i] = pricing_weight(ads[i]) * bids[i];
    return argsort_descending(scores);
}

} // namespace detail

/// Cost per click advertiser `advertiser` would pay after bidding just
/// enough to occupy `target_pos` (everyone else's bids fixed): the
/// weighted bid of the ad that ends up directly below, divided by the
/// deviator's own weight. Ties at the boundary go to the deviator.
inline double deviation_price(std::span<const Advertiser> ads, const BidVector& bids,
                              std::size_t advertiser, std::size_t target_pos) {
    detail::require_auction_input(ads, bids);
    const std::size_t n = ads.size();
    if (advertiser >= n) throw std::out_of_range("deviation: advertiser index out of range");
    if (target_pos >= n) throw std::out_of_range("deviation: target position out of range");

    const double w = pricing_weight(ads[advertiser]);
    if (w == 0.0) return 0.0;

    std::vector<std::size_t> others = detail::pricing_order(ads, bids);
    others.erase(std::find(others.begin(), others.end(), advertiser));
    // In the deviated order the ad below the deviator is the one holding
    // `target_pos` among the others (covers the move-one-up swap case).
    if (target_pos == n - 1) return 0.0;
    const std::size_t below = others[target_pos];
    return pricing_weight(ads[below]) * bids[below] / w;
}

/// Expected profit of `advertiser` at `target_pos` with everyone else's
/// bids fixed; `std::nullopt` means withdrawing from the auction (no
/// clicks, no payment).
inline double deviation_profit(std::span<const Advertiser> ads, const BidVector& bids,
                               std::size_t advertiser, std::optional<std::size_t> target_pos) {
    detail::require_auction_input(ads, bids);
    const std::size_t n = ads.size();
    if (advertiser >= n) throw std::out_of_range("deviation: advertiser index out of range");
    if (!target_pos) return 0.0;
    if (*target_pos >= n) throw std::out_of_range("deviation: target position out of range");

    const double price = deviation_price(ads, bids, advertiser, *target_pos);

    std::vector<std::size_t> others = detail::pricing_order(ads, bids);
    others.erase(std::find(others.begin(), others.end(), advertiser));
    double view = 1.0;
    for (std::size_t pos = 0; pos < *target_pos; ++pos)
        view *= 1.0 - std::min(absorption(ads[others[pos]]), 1.0);

    const Advertiser& a = ads[advertiser];
    return (a.value - price) * (a.ctr * view);
}

struct EquilibriumReport {
    BidVector bids;
    std::vector<std::size_t> allocation; ///< pricing order at those bids
    bool is_envy_free = false;
    double worst_violation = 0.0; ///< best profit gain any deviation achieves
    double se_revenue = 0.0;
    double social_revenue = 0.0;
    double vcg_truthful_revenue = 0.0;
};

/// Search-engine revenue of VCG when every advertiser bids its value.
inline double vcg_truthful_revenue(std::span<const Advertiser> ads) {
    std::vector<double> values;
    values.reserve(ads.size());
    for (const Advertiser& a : ads) values.push_back(a.value);
    return run_vcg_auction(ads, BidVector(std::move(values))).se_revenue;
}

/// Exhaustive envy-freeness check: every advertiser tries every position
/// and dropping out; the report records the single best gain found.
inline EquilibriumReport verify_equilibrium(std::span<const Advertiser> ads,
                                            const BidVector& bids, double tolerance = 1e-9) {
    detail::require_auction_input(ads, bids);
    const std::size_t n = ads.size();
    const AuctionOutcome outcome = run_ce_auction(ads, bids);

    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        const double current = outcome.advertiser_profits[i];
        worst = std::max(worst, 0.0 - current); // withdraw
        for (std::size_t m = 0; m < n; ++m)
            worst = std::max(worst, deviation_profit(ads, bids, i, m) - current);
    }

    EquilibriumReport report{.bids = bids, .allocation = outcome.allocation};
    report.worst_violation = worst;
    report.is_envy_free = worst <= tolerance;
    report.se_revenue = outcome.se_revenue;
    report.social_revenue = social_revenue_bound(ads);
    report.vcg_truthful_revenue = vcg_truthful_revenue(ads);
    return report;
}

struct VcgEquivalenceReport {
    std::vector<double> ce_prices;  ///< CE prices at equilibrium bids, per position
    std::vector<double> vcg_prices; ///< VCG prices at truthful bids, same order
    double max_abs_gap = 0.0;
};

/// Per-position comparison of CE pricing at the equilibrium bids against
/// VCG pricing at truthful bids on the common allocation order.
inline VcgEquivalenceReport vcg_equivalence_check(std::span<const Advertiser> ads) {
    const BidVector eq_bids = equilibrium_bids(ads);
    const AuctionOutcome ce_outcome = run_ce_auction(ads, eq_bids);

    std::vector<double> values;
    values.reserve(ads.size());
    for (const Advertiser& a : ads) values.push_back(a.value);
    const std::vector<double> truthful_vcg = vcg_prices(ads, BidVector(std::move(values)));

    VcgEquivalenceReport report;
    report.ce_prices = ce_outcome.prices;
    report.vcg_prices = truthful_vcg;
    for (std::size_t pos = 0; pos < report.ce_prices.size(); ++pos)
        report.max_abs_gap = std::max(
            report.max_abs_gap, std::abs(report.ce_prices[pos] - report.vcg_prices[pos]));
    return report;
}

} // namespace ce
