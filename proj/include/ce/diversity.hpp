#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ce/model.hpp"
#include "ce/ranking.hpp"

// Ranking with mutual influence: an entity loses utility when similar
// entities sit above it in the list. Similarity touches only the
// (residual) utility; click and abandonment behavior stay per-entity.
// Includes the exact solvers used to exercise the independent-set
// correspondence on small instances.

namespace ce {

enum class ResidualRule {
    zero_if_duplicate_above, ///< an exact duplicate above wipes the utility
    linear_discount,         ///< utility scaled by prod (1 - sim) over the prefix
};

using AdjacencyMatrix = std::vector<std::vector<int>>;

struct DiversityInstance {
    std::vector<Entity> entities;
    std::vector<std::vector<double>> similarity; ///< symmetric, unit diagonal, entries in [0,1]
    ResidualRule rule = ResidualRule::zero_if_duplicate_above;

    DiversityInstance(std::vector<Entity> entities_, std::vector<std::vector<double>> similarity_,
                      ResidualRule rule_ = ResidualRule::zero_if_duplicate_above)
        : entities(std::move(entities_)), similarity(std::move(similarity_)), rule(rule_) {
        const std::size_t n = entities.size();
        if (similarity.size() != n)
            throw std::invalid_argument("diversity: similarity row count does not match entities");
        for (std::size_t i = 0; i < n; ++i) {
            if (similarity[i].size() != n)
                throw std::invalid_argument("diversity: similarity matrix is not square");
            if (similarity[i][i] != 1.0)
                throw std::invalid_argument("diversity: similarity diagonal must be 1");
            for (std::size_t j = 0; j < n; ++j) {
                const double s = similarity[i][j];
                if (!(s >= 0.0 && s <= 1.0))
                    throw std::invalid_argument("diversity: similarity entries must be in [0,1]");
                if (similarity[i][j] != similarity[j][i])
                    throw std::invalid_argument("diversity: similarity must be symmetric");
            }
        }
    }

    std::size_t size() const { return entities.size(); }
};

/// Residual utility of `entity` when the entities in `prefix` sit above it.
inline double residual_utility(const DiversityInstance& instance, std::size_t entity,
                               std::span<const std::size_t> prefix) {
    double u = instance.entities[entity].utility;
    for (std::size_t above : prefix) {
        const double sim = instance.similarity[entity][above];
        if (instance.rule == ResidualRule::zero_if_duplicate_above) {
            if (sim == 1.0) return 0.0;
        } else {
            u *= 1.0 - sim;
        }
    }
    return u;
}

/// Residual utility of the entity at each position of `order`, after
/// discounting for what sits above it.
inline std::vector<double> residual_utilities(const DiversityInstance& instance,
                                              const std::vector<std::size_t>& order) {
    if (order.size() != instance.size())
        throw std::invalid_argument("diversity: order length does not match instance");
    std::vector<double> residual(order.size(), 0.0);
    for (std::size_t pos = 0; pos < order.size(); ++pos)
        residual[pos] =
            residual_utility(instance, order[pos], std::span(order.data(), pos));
    return residual;
}

/// Objective: sum of residual utility times cascade click probability.
inline double residual_expected_utility(const DiversityInstance& instance,
                                        const std::vector<std::size_t>& order) {
    const std::vector<double> residual = residual_utilities(instance, order);
    double value = 0.0;
    double view = 1.0;
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        const Entity& e = instance.entities[order[pos]];
        value += residual[pos] * (e.click_prob * view);
        view *= 1.0 - std::min(absorption(e), 1.0);
    }
    return value;
}

/// Input-entity indices whose residual utility is strictly positive under
/// `order` (the "retained" set used by the independent-set check).
inline std::vector<std::size_t> nonzero_residual_set(const DiversityInstance& instance,
                                                     const std::vector<std::size_t>& order) {
    const std::vector<double> residual = residual_utilities(instance, order);
    std::vector<std::size_t> kept;
    for (std::size_t pos = 0; pos < order.size(); ++pos)
        if (residual[pos] > 0.0) kept.push_back(order[pos]);
    std::sort(kept.begin(), kept.end());
    return kept;
}

/// Exhaustive argmax of the diversity objective; lexicographically
/// smallest permutation among exact ties. Same 10-entity guard as the
/// plain ranking oracle.
inline BruteForceResult brute_force_diversity(const DiversityInstance& instance) {
    const std::size_t n = instance.size();
    if (n == 0) throw std::invalid_argument("diversity: instance is empty");
    if (n > kBruteForceLimit)
        throw std::length_error("diversity brute force: instance exceeds the permutation guard of 10");

    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    BruteForceResult best;
    best.value = -1.0;
    do {
        const double value = residual_expected_utility(instance, perm);
        if (value > best.value) {
            best.value = value;
            best.order = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

/// Greedy heuristic: repeatedly append the entity with the best residual
/// click-efficiency score U_r * C / (C + gamma) given the prefix chosen
/// so far. No approximation ratio is claimed; the hardness reduction
/// rules out constant-ratio guarantees.
inline BruteForceResult greedy_diversity(const DiversityInstance& instance) {
    const std::size_t n = instance.size();
    if (n == 0) throw std::invalid_argument("diversity: instance is empty");

    std::vector<std::size_t> order;
    order.reserve(n);
    std::vector<bool> used(n, false);
    for (std::size_t step = 0; step < n; ++step) {
        std::size_t pick = n;
        double best_score = -1.0;
        for (std::size_t cand = 0; cand < n; ++cand) {
            if (used[cand]) continue;
            const Entity& e = instance.entities[cand];
            const double u = residual_utility(instance, cand, order);
            const double score = e.click_prob == 0.0 ? 0.0 : u * e.click_prob / absorption(e);
            if (score > best_score) {
                best_score = score;
                pick = cand;
            }
        }
        used[pick] = true;
        order.push_back(pick);
    }

    BruteForceResult result;
    result.value = residual_expected_utility(instance, order);
    result.order = std::move(order);
    return result;
}

inline void validate_adjacency(const AdjacencyMatrix& adjacency) {
    const std::size_t n = adjacency.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (adjacency[i].size() != n)
            throw std::invalid_argument("graph: adjacency matrix is not square");
        if (adjacency[i][i] != 0)
            throw std::invalid_argument("graph: adjacency diagonal must be 0");
        for (std::size_t j = 0; j < n; ++j) {
            if (adjacency[i][j] != 0 && adjacency[i][j] != 1)
                throw std::invalid_argument("graph: adjacency entries must be 0 or 1");
            if (adjacency[i][j] != adjacency[j][i])
                throw std::invalid_argument("graph: adjacency must be symmetric");
        }
    }
}

/// Graph-to-ranking reduction: vertices become entities sharing one
/// (U, C, gamma) triple, edges become similarity 1, and the duplicate
/// rule applies, so an optimal ranking keeps an independent set on top.
inline DiversityInstance instance_from_graph(const AdjacencyMatrix& adjacency, double utility,
                                             double click_prob, double abandon_prob) {
    validate_adjacency(adjacency);
    const std::size_t n = adjacency.size();
    std::vector<Entity> entities;
    entities.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        entities.emplace_back("v" + std::to_string(i), utility, click_prob, abandon_prob);
    std::vector<std::vector<double>> similarity(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        similarity[i][i] = 1.0;
        for (std::size_t j = 0; j < n; ++j)
            if (adjacency[i][j] != 0) similarity[i][j] = 1.0;
    }
    return DiversityInstance(std::move(entities), std::move(similarity),
                             ResidualRule::zero_if_duplicate_above);
}

inline constexpr std::size_t kIndependentSetLimit = 20;

/// Maximum-cardinality independent set by subset enumeration (2^N),
/// guarded at 20 vertices; lexicographically smallest vertex set among
/// ties.
inline std::vector<std::size_t> max_independent_set_bruteforce(const AdjacencyMatrix& adjacency) {
    validate_adjacency(adjacency);
    const std::size_t n = adjacency.size();
    if (n > kIndependentSetLimit)
        throw std::length_error("independent set: instance exceeds the subset guard of 20");

    std::vector<std::uint32_t> neighbors(n, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (adjacency[i][j] != 0) neighbors[i] |= std::uint32_t{1} << j;

    const auto to_vertices = [n](std::uint32_t mask) {
        std::vector<std::size_t> vertices;
        for (std::size_t v = 0; v < n; ++v)
            if (mask & (std::uint32_t{1} << v)) vertices.push_back(v);
        return vertices;
    };

    std::vector<std::size_t> best;
    for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << n); ++mask) {
        if (static_cast<std::size_t>(std::popcount(mask)) < std::max<std::size_t>(best.size(), 1))
            continue;
        bool independent = true;
        for (std::size_t v = 0; v < n && independent; ++v)
            if ((mask & (std::uint32_t{1} << v)) && (neighbors[v] & mask)) independent = false;
        if (!independent) continue;
        std::vector<std::size_t> vertices = to_vertices(mask);
        if (vertices.size() > best.size() || (vertices.size() == best.size() && vertices < best))
            best = std::move(vertices);
    }
    return best;
}

} // namespace ce
