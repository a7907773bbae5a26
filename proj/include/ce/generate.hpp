#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ce/auction.hpp"
#include "ce/diversity.hpp"
#include "ce/model.hpp"
#include "ce/random.hpp"

// Deterministic random instances for the property suites. Abandonment is
// drawn as a fraction of the mass left after the click probability
// (gamma = f * (1 - C)), which covers the C + gamma <= 1 simplex without
// rejection loops.

namespace ce {

struct ParameterRanges {
    double utility_lo = 0.1;
    double utility_hi = 5.0;
    double click_lo = 0.05;
    double click_hi = 0.95;
    double abandon_fraction_lo = 0.0;
    double abandon_fraction_hi = 1.0;
};

inline Entity random_entity(SplitMix64& rng, const ParameterRanges& ranges, std::string id) {
    const double utility = rng.next_double(ranges.utility_lo, ranges.utility_hi);
    const double click = rng.next_double(ranges.click_lo, ranges.click_hi);
    const double fraction = rng.next_double(ranges.abandon_fraction_lo, ranges.abandon_fraction_hi);
    return Entity(std::move(id), utility, click, fraction * (1.0 - click));
}

inline std::vector<Entity> random_entities(SplitMix64& rng, std::size_t n,
                                           const ParameterRanges& ranges = {}) {
    std::vector<Entity> entities;
    entities.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        entities.push_back(random_entity(rng, ranges, "e" + std::to_string(i + 1)));
    return entities;
}

inline std::vector<Advertiser> random_advertisers(SplitMix64& rng, std::size_t n,
                                                  const ParameterRanges& ranges = {}) {
    std::vector<Advertiser> ads;
    ads.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Entity e = random_entity(rng, ranges, "a" + std::to_string(i + 1));
        ads.emplace_back(e.id, e.utility, e.click_prob, e.abandon_prob);
    }
    return ads;
}

inline BidVector random_bids(SplitMix64& rng, std::size_t n, double lo = 0.1, double hi = 10.0) {
    std::vector<double> bids;
    bids.reserve(n);
    for (std::size_t i = 0; i < n; ++i) bids.push_back(rng.next_double(lo, hi));
    return BidVector(std::move(bids));
}

/// Erdos-Renyi G(n, p) adjacency matrix.
inline AdjacencyMatrix random_graph(SplitMix64& rng, std::size_t n, double edge_prob) {
    AdjacencyMatrix adjacency(n, std::vector<int>(n, 0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (rng.next_double() < edge_prob) adjacency[i][j] = adjacency[j][i] = 1;
    return adjacency;
}

} // namespace ce
