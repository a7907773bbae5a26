#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ce/model.hpp"

// Click-efficiency ranking and the family of reduced ranking rules it
// collapses to under limiting assumptions on the click model, plus an
// exhaustive permutation oracle for cross-checking optimality.

namespace ce {

/// Click efficiency: utility generated per unit of view probability the
/// entity consumes, U*C/(C+gamma). An entity that can never be clicked
/// (C = 0) scores 0 regardless of gamma.
inline double ce_score(const Entity& e) {
    if (e.click_prob == 0.0) return 0.0;
    return e.utility * e.click_prob / absorption(e);
}

/// The reduced ranking rules. Each corresponds to an assumption under
/// which sorting by the simpler score is equivalent to sorting by CE:
///  - prp / bid_order:     gamma = 0, sort by utility alone
///  - relevance_squared_over_k: C ~ U and gamma = k - U, score U^2/k
///  - perceived_times_actual / expected_profit: gamma = k - C, score C*U
///  - abandonment_aware:   C ~ U, score U^2/(U + gamma)
///  - social_optimal:      CE with utility read as private value
enum class RankingVariant {
    ce,
    prp,
    relevance_squared_over_k,
    perceived_times_actual,
    abandonment_aware,
    bid_order,
    expected_profit,
    social_optimal,
};

inline const char* variant_name(RankingVariant v) {
    switch (v) {
        case RankingVariant::ce: return "ce";
        case RankingVariant::prp: return "prp";
        case RankingVariant::relevance_squared_over_k: return "r2_over_k";
        case RankingVariant::perceived_times_actual: return "perceived_times_actual";
        case RankingVariant::abandonment_aware: return "abandonment_aware";
        case RankingVariant::bid_order: return "bid_order";
        case RankingVariant::expected_profit: return "expected_profit";
        case RankingVariant::social_optimal: return "social_optimal";
    }
    return "?";
}

inline std::optional<RankingVariant> parse_variant(std::string_view name) {
    for (RankingVariant v : {RankingVariant::ce, RankingVariant::prp,
                             RankingVariant::relevance_squared_over_k,
                             RankingVariant::perceived_times_actual,
                             RankingVariant::abandonment_aware, RankingVariant::bid_order,
                             RankingVariant::expected_profit, RankingVariant::social_optimal}) {
        if (name == variant_name(v)) return v;
    }
    return std::nullopt;
}

inline bool variant_requires_k(RankingVariant v) {
    return v == RankingVariant::relevance_squared_over_k;
}

/// Score of one entity under a variant. `k` is the taxonomy constant for
/// rules derived from the gamma = k - C assumption; only r2_over_k needs
/// it for the score itself (elsewhere the 1/k factor cancels in the sort).
inline double variant_score(const Entity& e, RankingVariant variant,
                            std::optional<double> k = std::nullopt) {
    switch (variant) {
        case RankingVariant::ce:
        case RankingVariant::social_optimal:
            return ce_score(e);
        case RankingVariant::prp:
        case RankingVariant::bid_order:
            return e.utility;
        case RankingVariant::relevance_squared_over_k: {
            if (!k) throw std::invalid_argument("variant r2_over_k requires the constant k");
            if (!(*k > 0.0 && *k <= 1.0))
                throw std::invalid_argument("taxonomy constant k must be in (0,1]");
            return e.utility * e.utility / *k;
        }
        case RankingVariant::perceived_times_actual:
        case RankingVariant::expected_profit:
            return e.click_prob * e.utility;
        case RankingVariant::abandonment_aware: {
            if (e.utility == 0.0) return 0.0;
            return e.utility * e.utility / (e.utility + e.abandon_prob);
        }
    }
    throw std::invalid_argument("unknown ranking variant");
}

inline std::vector<double> variant_scores(std::span<const Entity> entities, RankingVariant variant,
                                          std::optional<double> k = std::nullopt) {
    std::vector<double> scores;
    scores.reserve(entities.size());
    for (const Entity& e : entities) scores.push_back(variant_score(e, variant, k));
    return scores;
}

/// Permutation sorting indices by descending score; equal scores keep
/// ascending input order, so the result is deterministic.
inline std::vector<std::size_t> argsort_descending(std::span<const double> scores) {
    std::vector<std::size_t> order(scores.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    return order;
}

inline Ranking rank_by_variant(std::span<const Entity> entities, RankingVariant variant,
                               std::optional<double> k = std::nullopt) {
    if (entities.empty()) throw std::invalid_argument("rank: entity list is empty");
    const std::vector<double> scores = variant_scores(entities, variant, k);
    return Ranking(entities, argsort_descending(scores));
}

/// Descending click efficiency, the expected-utility-optimal order.
inline Ranking rank_by_ce(std::span<const Entity> entities) {
    return rank_by_variant(entities, RankingVariant::ce);
}

struct BruteForceResult {
    std::vector<std::size_t> order;
    double value = 0.0;
};

inline constexpr std::size_t kBruteForceLimit = 10;

/// Exhaustive argmax of expected utility over all permutations.
/// Permutations are visited in lexicographic order and only strict
/// improvements are kept, so ties resolve to the lexicographically
/// smallest permutation. Guarded at 10 entities (10! orders).
inline BruteForceResult brute_force_optimal(std::span<const Entity> entities) {
    const std::size_t n = entities.size();
    if (n == 0) throw std::invalid_argument("brute force: entity list is empty");
    if (n > kBruteForceLimit)
        throw std::length_error("brute force: instance exceeds the permutation guard of 10");

    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;

    BruteForceResult best;
    best.value = -1.0;
    do {
        double value = 0.0;
        double view = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            const Entity& e = entities[perm[i]];
            value += e.utility * e.click_prob * view;
            view *= 1.0 - std::min(absorption(e), 1.0);
        }
        if (value > best.value) {
            best.value = value;
            best.order = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

/// True when two score vectors induce the same descending order up to
/// tie sets: each vector must be non-increasing along the other's
/// argsort, allowing `tol` of slack for float noise.
inline bool same_order_modulo_ties(std::span<const double> a, std::span<const double> b,
                                   double tol = 1e-12) {
    if (a.size() != b.size()) return false;
    const auto sorted_along = [tol](std::span<const double> scores,
                                    const std::vector<std::size_t>& order) {
        for (std::size_t i = 1; i < order.size(); ++i)
            if (scores[order[i]] > scores[order[i - 1]] + tol) return false;
        return true;
    };
    return sorted_along(b, argsort_descending(a)) && sorted_along(a, argsort_descending(b));
}

} // namespace ce
