#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ce/model.hpp"
#include "ce/ranking.hpp"

// Position auctions under the cascade model. All mechanisms here rank
// every advertiser (N slots for N advertisers, no reserve price) and
// charge per click the minimum bid that holds the position, each under
// its own ordering rule. Positions are 0-based, prices are per position,
// profits per input advertiser.

namespace ce {

struct Advertiser {
    std::string id;
    double value = 0.0;        ///< private value per click
    double ctr = 0.0;          ///< click probability given a view
    double abandon_prob = 0.0; ///< stop-browsing probability given a view

    Advertiser(std::string id_, double value_, double ctr_, double abandon_prob_)
        : id(std::move(id_)), value(value_), ctr(ctr_), abandon_prob(abandon_prob_) {
        if (!std::isfinite(value) || value < 0.0)
            throw std::invalid_argument("advertiser '" + id + "': value must be finite and >= 0");
        if (!std::isfinite(ctr) || ctr < 0.0 || ctr > 1.0)
            throw std::invalid_argument("advertiser '" + id + "': ctr must be in [0,1]");
        if (!std::isfinite(abandon_prob) || abandon_prob < 0.0 || abandon_prob > 1.0)
            throw std::invalid_argument("advertiser '" + id + "': abandon_prob must be in [0,1]");
        if (ctr + abandon_prob > 1.0 + kProbabilitySlack)
            throw std::invalid_argument("advertiser '" + id + "': ctr + abandon_prob exceeds 1");
    }
};

inline double absorption(const Advertiser& a) { return a.ctr + a.abandon_prob; }

/// Pricing weight w = c / (c + gamma). An advertiser that is never
/// clicked (c = 0) weighs 0 and therefore sorts to the bottom and pays
/// nothing, even when it still absorbs views through gamma.
inline double pricing_weight(const Advertiser& a) {
    if (a.ctr == 0.0) return 0.0;
    return a.ctr / absorption(a);
}

/// The advertisers reinterpreted as rankable entities with utility set
/// to the private value (the social / revenue-optimal reading).
inline std::vector<Entity> as_entities(std::span<const Advertiser> ads) {
    std::vector<Entity> entities;
    entities.reserve(ads.size());
    for (const Advertiser& a : ads) entities.emplace_back(a.id, a.value, a.ctr, a.abandon_prob);
    return entities;
}

class BidVector {
public:
    explicit BidVector(std::vector<double> bids) : bids_(std::move(bids)) {
        for (std::size_t i = 0; i < bids_.size(); ++i)
            if (!std::isfinite(bids_[i]) || bids_[i] < 0.0)
                throw std::invalid_argument("bids[" + std::to_string(i)
                                            + "]: bid must be finite and >= 0");
    }

    std::size_t size() const { return bids_.size(); }
    double operator[](std::size_t i) const { return bids_.at(i); }
    const std::vector<double>& values() const { return bids_; }

private:
    std::vector<double> bids_;
};

enum class Mechanism { ce, gsp, overture, vcg };

inline const char* mechanism_name(Mechanism m) {
    switch (m) {
        case Mechanism::ce: return "ce";
        case Mechanism::gsp: return "gsp";
        case Mechanism::overture: return "overture";
        case Mechanism::vcg: return "vcg";
    }
    return "?";
}

inline std::optional<Mechanism> parse_mechanism(std::string_view name) {
    for (Mechanism m : {Mechanism::ce, Mechanism::gsp, Mechanism::overture, Mechanism::vcg})
        if (name == mechanism_name(m)) return m;
    return std::nullopt;
}

struct AuctionOutcome {
    std::vector<std::size_t> allocation; ///< position -> advertiser index
    std::vector<double> rank_scores;     ///< per position, the score that placed the ad there
    std::vector<double> prices;          ///< per position cost per click
    std::vector<double> click_probs;     ///< per position P_c
    std::vector<double> advertiser_profits; ///< per input advertiser, (v - p) * P_c
    double se_revenue = 0.0;    ///< sum of p * P_c
    double total_revenue = 0.0; ///< sum of v * P_c
};

namespace detail {

inline void require_auction_input(std::span<const Advertiser> ads, const BidVector& bids) {
    if (ads.empty()) throw std::invalid_argument("auction: advertiser list is empty");
    if (bids.size() != ads.size())
        throw std::invalid_argument("auction: bid count does not match advertiser count");
}

/// Fills click probabilities and the revenue split for a fixed
/// allocation and price schedule.
inline AuctionOutcome assemble_outcome(std::span<const Advertiser> ads,
                                       std::vector<std::size_t> allocation,
                                       std::vector<double> prices,
                                       std::vector<double> rank_scores) {
    AuctionOutcome out;
    out.allocation = std::move(allocation);
    out.prices = std::move(prices);
    out.rank_scores = std::move(rank_scores);
    out.click_probs.reserve(ads.size());
    out.advertiser_profits.assign(ads.size(), 0.0);

    double view = 1.0;
    for (std::size_t pos = 0; pos < out.allocation.size(); ++pos) {
        const Advertiser& a = ads[out.allocation[pos]];
        const double pc = a.ctr * view;
        out.click_probs.push_back(pc);
        out.se_revenue += out.prices[pos] * pc;
        out.total_revenue += a.value * pc;
        out.advertiser_profits[out.allocation[pos]] = (a.value - out.prices[pos]) * pc;
        view *= 1.0 - std::min(absorption(a), 1.0);
    }
    return out;
}

} // namespace detail

/// CE mechanism: rank by descending w*b, charge the minimum bid that
/// keeps the position, p_i = w_{i+1} b_{i+1} / w_i. The bottom slot is
/// free (no advertiser below, no reserve).
inline AuctionOutcome run_ce_auction(std::span<const Advertiser> ads, const BidVector& bids) {
    detail::require_auction_input(ads, bids);
    const std::size_t n = ads.size();
    std::vector<double> scores(n);
    for (std::size_t i = 0; i < n; ++i) scores[i] = pricing_weight(ads[i]) * bids[i];
    std::vector<std::size_t> allocation = argsort_descending(scores);

    std::vector<double> prices(n, 0.0);
    std::vector<double> ordered_scores(n);
    for (std::size_t pos = 0; pos < n; ++pos) ordered_scores[pos] = scores[allocation[pos]];
    for (std::size_t pos = 0; pos + 1 < n; ++pos) {
        const double w = pricing_weight(ads[allocation[pos]]);
        prices[pos] = w > 0.0 ? ordered_scores[pos + 1] / w : 0.0;
    }
    return detail::assemble_outcome(ads, std::move(allocation), std::move(prices),
                                    std::move(ordered_scores));
}

/// GSP: rank by c*b, charge p_i = b_{i+1} c_{i+1} / c_i.
inline AuctionOutcome run_gsp_auction(std::span<const Advertiser> ads, const BidVector& bids) {
    detail::require_auction_input(ads, bids);
    const std::size_t n = ads.size();
    std::vector<double> scores(n);
    for (std::size_t i = 0; i < n; ++i) scores[i] = ads[i].ctr * bids[i];
    std::vector<std::size_t> allocation = argsort_descending(scores);

    std::vector<double> prices(n, 0.0);
    std::vector<double> ordered_scores(n);
    for (std::size_t pos = 0; pos < n; ++pos) ordered_scores[pos] = scores[allocation[pos]];
    for (std::size_t pos = 0; pos + 1 < n; ++pos) {
        const double c = ads[allocation[pos]].ctr;
        prices[pos] = c > 0.0 ? ordered_scores[pos + 1] / c : 0.0;
    }
    return detail::assemble_outcome(ads, std::move(allocation), std::move(prices),
                                    std::move(ordered_scores));
}

/// Overture: rank by bid, pay the next bid down.
inline AuctionOutcome run_overture_auction(std::span<const Advertiser> ads,
                                           const BidVector& bids) {
    detail::require_auction_input(ads, bids);
    const std::size_t n = ads.size();
    std::vector<std::size_t> allocation = argsort_descending(bids.values());

    std::vector<double> prices(n, 0.0);
    std::vector<double> ordered_scores(n);
    for (std::size_t pos = 0; pos < n; ++pos) ordered_scores[pos] = bids[allocation[pos]];
    for (std::size_t pos = 0; pos + 1 < n; ++pos) prices[pos] = ordered_scores[pos + 1];
    return detail::assemble_outcome(ads, std::move(allocation), std::move(prices),
                                    std::move(ordered_scores));
}

/// VCG payments on the bid-optimal order (descending b*c/mu, which is the
/// same order the CE mechanism produces). Each position pays, per click,
/// the expected bid-weighted loss its presence inflicts on the ads below:
/// p_i = (mu_i / c_i) * sum_{j>i} b_j c_j prod_{i<k<j} (1 - mu_k).
inline std::vector<double> vcg_prices(std::span<const Advertiser> ads, const BidVector& bids) {
    detail::require_auction_input(ads, bids);
    const std::size_t n = ads.size();
    std::vector<double> scores(n);
    for (std::size_t i = 0; i < n; ++i) scores[i] = pricing_weight(ads[i]) * bids[i];
    const std::vector<std::size_t> allocation = argsort_descending(scores);

    std::vector<double> prices(n, 0.0);
    for (std::size_t pos = 0; pos + 1 < n; ++pos) {
        const Advertiser& here = ads[allocation[pos]];
        if (here.ctr == 0.0) continue;
        double loss = 0.0;
        double discount = 1.0;
        for (std::size_t j = pos + 1; j < n; ++j) {
            const Advertiser& below = ads[allocation[j]];
            loss += bids[allocation[j]] * below.ctr * discount;
            discount *= 1.0 - std::min(absorption(below), 1.0);
        }
        prices[pos] = absorption(here) / here.ctr * loss;
    }
    return prices;
}

/// The same payments through the recursive route:
/// p_i = (mu_i/c_i) [ b_{i+1} c_{i+1} + (1-mu_{i+1}) (c_{i+1}/mu_{i+1}) p_{i+1} ],
/// bottom position 0. Defined for positive ctrs; kept as an independent
/// path so the two routes can cross-check each other.
inline std::vector<double> vcg_prices_recursive(std::span<const Advertiser> ads,
                                                const BidVector& bids) {
    detail::require_auction_input(ads, bids);
    const std::size_t n = ads.size();
    std::vector<double> scores(n);
    for (std::size_t i = 0; i < n; ++i) scores[i] = pricing_weight(ads[i]) * bids[i];
    const std::vector<std::size_t> allocation = argsort_descending(scores);

    std::vector<double> prices(n, 0.0);
    for (std::size_t pos = n - 1; pos-- > 0;) {
        const Advertiser& here = ads[allocation[pos]];
        const Advertiser& below = ads[allocation[pos + 1]];
        if (here.ctr == 0.0) continue;
        double carry = 0.0;
        if (below.ctr > 0.0)
            carry = (1.0 - absorption(below)) * below.ctr / absorption(below) * prices[pos + 1];
        prices[pos] =
            absorption(here) / here.ctr * (bids[allocation[pos + 1]] * below.ctr + carry);
    }
    return prices;
}

inline AuctionOutcome run_vcg_auction(std::span<const Advertiser> ads, const BidVector& bids) {
    detail::require_auction_input(ads, bids);
    const std::size_t n = ads.size();
    std::vector<double> scores(n);
    for (std::size_t i = 0; i < n; ++i) scores[i] = pricing_weight(ads[i]) * bids[i];
    std::vector<std::size_t> allocation = argsort_descending(scores);
    std::vector<double> ordered_scores(n);
    for (std::size_t pos = 0; pos < n; ++pos) ordered_scores[pos] = scores[allocation[pos]];
    return detail::assemble_outcome(ads, std::move(allocation), vcg_prices(ads, bids),
                                    std::move(ordered_scores));
}

inline AuctionOutcome run_auction(std::span<const Advertiser> ads, const BidVector& bids,
                                  Mechanism mechanism) {
    switch (mechanism) {
        case Mechanism::ce: return run_ce_auction(ads, bids);
        case Mechanism::gsp: return run_gsp_auction(ads, bids);
        case Mechanism::overture: return run_overture_auction(ads, bids);
        case Mechanism::vcg: return run_vcg_auction(ads, bids);
    }
    throw std::invalid_argument("unknown mechanism");
}

/// Upper bound on the total revenue any ranking and pricing can realize:
/// the expected value mass when ads are placed in descending v*c/mu
/// order. Falls out of the CE ranking with utility := private value.
inline double social_revenue_bound(std::span<const Advertiser> ads) {
    if (ads.empty()) throw std::invalid_argument("auction: advertiser list is empty");
    const std::vector<Entity> entities = as_entities(ads);
    return expected_utility(rank_by_ce(entities)).expected_utility;
}

} // namespace ce
