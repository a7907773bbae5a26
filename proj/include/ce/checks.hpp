#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "ce/commands.hpp"
#include "ce/equilibrium.hpp"
#include "ce/generate.hpp"
#include "ce/ranking.hpp"
#include "ce/scenario.hpp"
#include "ce/simulate.hpp"

// The executable property suite: every optimality, equilibrium and
// reduction claim the library rests on, run at configurable instance counts with pinned tolerances.
// The acceptance binary runs the full-scale defaults; the CLI selfcheck
// runs the reduced configuration.

namespace ce {

struct CheckConfig {
    std::uint64_t seed = 20260808;
    std::size_t optimality_instances = 10000;  ///< brute-force optimality + swaps
    std::size_t taxonomy_instances = 1000;     ///< per reduction family
    std::size_t auction_instances = 1000;      ///< order/IR/reduction/dominance sweeps
    std::size_t equilibrium_instances = 1000;  ///< envy-freeness + VCG equivalence
    std::size_t mc_rankings = 100;             ///< Monte-Carlo consistency rankings
    std::size_t mc_trials = 100000;            ///< trials per ranking
    std::size_t random_graphs = 50;            ///< diversity reduction graphs
    std::size_t io_roundtrips = 50;            ///< scenarios per kind for round-trips

    static CheckConfig reduced() {
        CheckConfig config;
        config.optimality_instances = 500;
        config.taxonomy_instances = 100;
        config.auction_instances = 100;
        config.equilibrium_instances = 100;
        config.mc_rankings = 10;
        config.mc_trials = 20000;
        config.random_graphs = 10;
        config.io_roundtrips = 10;
        return config;
    }
};

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string details;
};

namespace detail {

inline std::string fmt(double value) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.3g", value);
    return buffer;
}

inline std::string over(std::size_t count) {
    return " over " + std::to_string(count) + " instances";
}

} // namespace detail

/// Optimality: descending CE attains the brute-force permutation maximum.
inline CheckResult check_ce_optimality(const CheckConfig& config) {
    double worst = 0.0;
    for (std::size_t i = 0; i < config.optimality_instances; ++i) {
        SplitMix64 rng(substream_seed(config.seed, i));
        const auto entities = random_entities(rng, rng.next_in(2, 8));
        const double by_ce = expected_utility(rank_by_ce(entities)).expected_utility;
        const double best = brute_force_optimal(entities).value;
        worst = std::max(worst, std::abs(best - by_ce));
    }
    return {"CE optimality vs brute force", worst <= 1e-12,
            "max |gap| " + detail::fmt(worst) + detail::over(config.optimality_instances)};
}

/// Exchange argument: no adjacent transposition of the CE order gains.
inline CheckResult check_adjacent_swaps(const CheckConfig& config) {
    double worst_gain = 0.0;
    for (std::size_t i = 0; i < config.optimality_instances; ++i) {
        SplitMix64 rng(substream_seed(config.seed, i));
        const auto entities = random_entities(rng, rng.next_in(2, 8));
        const auto order = rank_by_ce(entities).order();
        const double base = expected_utility(entities, order).expected_utility;
        for (std::size_t pos = 0; pos + 1 < order.size(); ++pos) {
            auto swapped = order;
            std::swap(swapped[pos], swapped[pos + 1]);
            worst_gain = std::max(
                worst_gain, expected_utility(entities, swapped).expected_utility - base);
        }
    }
    return {"Adjacent-swap dominance", worst_gain <= 1e-12,
            "max swap gain " + detail::fmt(worst_gain)
                + detail::over(config.optimality_instances)};
}

/// Taxonomy: gamma=0 collapses CE to PRP/bid order; gamma=k-C collapses
/// it to the expected-profit (C*U) order.
inline CheckResult check_taxonomy_reductions(const CheckConfig& config) {
    std::size_t mismatches = 0;
    for (std::size_t i = 0; i < config.taxonomy_instances; ++i) {
        SplitMix64 rng(substream_seed(config.seed ^ 0x7a01, i));
        ParameterRanges ranges;
        ranges.abandon_fraction_hi = 0.0;
        const auto entities = random_entities(rng, rng.next_in(2, 8), ranges);
        const auto ce_scores = variant_scores(entities, RankingVariant::ce);
        if (!same_order_modulo_ties(ce_scores, variant_scores(entities, RankingVariant::prp)))
            ++mismatches;
        if (!same_order_modulo_ties(ce_scores,
                                    variant_scores(entities, RankingVariant::bid_order)))
            ++mismatches;
    }
    for (std::size_t i = 0; i < config.taxonomy_instances; ++i) {
        SplitMix64 rng(substream_seed(config.seed ^ 0x7a02, i));
        const double k = rng.next_double(0.2, 1.0);
        const std::size_t n = rng.next_in(2, 8);
        std::vector<Entity> entities;
        for (std::size_t j = 0; j < n; ++j) {
            const double c = rng.next_double(0.02, 0.95 * k);
            entities.emplace_back("e" + std::to_string(j), rng.next_double(0.1, 5.0), c, k - c);
        }
        const auto ce_scores = variant_scores(entities, RankingVariant::ce);
        const auto cu_scores = variant_scores(entities, RankingVariant::expected_profit);
        if (!same_order_modulo_ties(ce_scores, cu_scores)) ++mismatches;
    }
    return {"Taxonomy reductions (gamma=0, gamma=k-C)", mismatches == 0,
            std::to_string(mismatches) + " order mismatches"
                + detail::over(2 * config.taxonomy_instances)};
}

/// Order preservation: the weighted-bid order equals the order of the
/// realized click efficiencies CE_i = p_i c_i / mu_i.
inline CheckResult check_order_preservation(const CheckConfig& config) {
    std::size_t mismatches = 0;
    for (std::size_t i = 0; i < config.auction_instances; ++i) {
        SplitMix64 rng(substream_seed(config.seed ^ 0x0401, i));
        const std::size_t n = rng.next_in(2, 8);
        const auto ads = random_advertisers(rng, n);
        const auto bids = random_bids(rng, n);
        const auto outcome = run_ce_auction(ads, bids);

        std::vector<double> wb(n), realized_ce(n);
        for (std::size_t adv = 0; adv < n; ++adv)
            wb[adv] = pricing_weight(ads[adv]) * bids[adv];
        for (std::size_t pos = 0; pos < n; ++pos) {
            const Advertiser& a = ads[outcome.allocation[pos]];
            realized_ce[outcome.allocation[pos]] =
                absorption(a) > 0.0 ? outcome.prices[pos] * a.ctr / absorption(a) : 0.0;
        }
        if (!same_order_modulo_ties(wb, realized_ce)) ++mismatches;
    }
    return {"Order preservation (w*b vs realized CE)", mismatches == 0,
            std::to_string(mismatches) + " argsort mismatches"
                + detail::over(config.auction_instances)};
}

/// Individual rationality: the price never exceeds the bid, in any of
/// the four mechanisms.
inline CheckResult check_individual_rationality(const CheckConfig& config) {
    std::size_t violations = 0;
    for (std::size_t i = 0; i < config.auction_instances; ++i) {
        SplitMix64 rng(substream_seed(config.seed ^ 0x0501, i));
        const std::size_t n = rng.next_in(1, 8);
        const auto ads = random_advertisers(rng, n);
        const auto bids = random_bids(rng, n);
        for (Mechanism mechanism :
             {Mechanism::ce, Mechanism::gsp, Mechanism::overture, Mechanism::vcg}) {
            const auto outcome = run_auction(ads, bids, mechanism);
            for (std::size_t pos = 0; pos < n; ++pos)
                if (outcome.prices[pos] > bids[outcome.allocation[pos]]) ++violations;
        }
    }
    return {"Individual rationality (p <= b, all mechanisms)", violations == 0,
            std::to_string(violations) + " violations"
                + detail::over(config.auction_instances)};
}

/// Mechanism reductions: gamma=0 reproduces Overture exactly; gamma=k-C
/// reproduces GSP within 1e-12.
inline CheckResult check_mechanism_reductions(const CheckConfig& config) {
    std::size_t failures = 0;
    double worst_gap = 0.0;
    for (std::size_t i = 0; i < config.auction_instances; ++i) {
        SplitMix64 rng(substream_seed(config.seed ^ 0x0601, i));
        const std::size_t n = rng.next_in(1, 8);
        ParameterRanges ranges;
        ranges.abandon_fraction_hi = 0.0;
        const auto ads = random_advertisers(rng, n, ranges);
        const auto bids = random_bids(rng, n);
        const auto ce_out = run_ce_auction(ads, bids);
        const auto ov_out = run_overture_auction(ads, bids);
        if (ce_out.allocation != ov_out.allocation || ce_out.prices != ov_out.prices) ++failures;
    }
    for (std::size_t i = 0; i < config.auction_instances; ++i) {
        SplitMix64 rng(substream_seed(config.seed ^ 0x0602, i));
        const double k = rng.next_double(0.2, 1.0);
        const std::size_t n = rng.next_in(2, 8);
        std::vector<Advertiser> ads;
        for (std::size_t j = 0; j < n; ++j) {
            const double c = rng.next_double(0.02, 0.95 * k);
            ads.emplace_back("a" + std::to_string(j), rng.next_double(0.5, 10.0), c, k - c);
        }
        const auto bids = random_bids(rng, n);
        const auto ce_out = run_ce_auction(ads, bids);
        const auto gsp_out = run_gsp_auction(ads, bids);
        if (ce_out.allocation != gsp_out.allocation) {
            ++failures;
            continue;
        }
        for (std::size_t pos = 0; pos < n; ++pos)
            worst_gap = std::max(worst_gap, std::abs(ce_out.prices[pos] - gsp_out.prices[pos]));
    }
    const bool passed = failures == 0 && worst_gap <= 1e-12;
    return {"Mechanism reductions (Overture exact, GSP 1e-12)", passed,
            std::to_string(failures) + " failures, max GSP gap " + detail::fmt(worst_gap)
                + detail::over(2 * config.auction_instances)};
}

/// Equilibrium: against the closed-form bids, exhaustive deviations never gain more than
/// 1e-9, and equilibrium revenue is socially optimal to 1e-12.
inline CheckResult check_nash_equilibrium(const CheckConfig& config) {
    double worst_violation = -std::numeric_limits<double>::infinity();
    double worst_social_gap = 0.0;
    for (std::size_t i = 0; i < config.equilibrium_instances; ++i) {
        SplitMix64 rng(substream_seed(config.seed ^ 0x0701, i));
        const auto ads = random_advertisers(rng, rng.next_in(1, 8));
        const auto bids = equilibrium_bids(ads);
        const auto report = verify_equilibrium(ads, bids, 1e-9);
        worst_violation = std::max(worst_violation, report.worst_violation);
        const auto outcome = run_ce_auction(ads, bids);
        worst_social_gap =
            std::max(worst_social_gap, std::abs(outcome.total_revenue - report.social_revenue));
    }
    const bool passed = worst_violation <= 1e-9 && worst_social_gap <= 1e-12;
    return {"Nash equilibrium (envy-free, socially optimal)", passed,
            "worst deviation gain " + detail::fmt(worst_violation) + ", max social gap "
                + detail::fmt(worst_social_gap) + detail::over(config.equilibrium_instances)};
}

/// Dominance: per position, CE never prices below VCG for the same bids.
inline CheckResult check_vcg_dominance(const CheckConfig& config) {
    double worst_deficit = 0.0;
    for (std::size_t i = 0; i < config.auction_instances; ++i) {
        SplitMix64 rng(substream_seed(config.seed ^ 0x0801, i));
        const std::size_t n = rng.next_in(1, 8);
        const auto ads = random_advertisers(rng, n);
        const auto bids = random_bids(rng, n);
        const auto ce_out = run_ce_auction(ads, bids);
        const auto vcg = vcg_prices(ads, bids);
        for (std::size_t pos = 0; pos < n; ++pos)
            worst_deficit = std::max(worst_deficit, vcg[pos] - ce_out.prices[pos]);
    }
    return {"Revenue dominance over VCG", worst_deficit <= 1e-12,
            "max per-position deficit " + detail::fmt(worst_deficit)
                + detail::over(config.auction_instances)};
}

/// Revenue equivalence: CE prices at equilibrium bids equal VCG prices at truthful
/// bids, per position.
inline CheckResult check_vcg_equivalence(const CheckConfig& config) {
    double worst_gap = 0.0;
    for (std::size_t i = 0; i < config.equilibrium_instances; ++i) {
        SplitMix64 rng(substream_seed(config.seed ^ 0x0901, i));
        const auto ads = random_advertisers(rng, rng.next_in(1, 8));
        worst_gap = std::max(worst_gap, vcg_equivalence_check(ads).max_abs_gap);
    }
    // Worked instance: both top prices are 2.4.
    const std::vector<Advertiser> worked = {Advertiser("a1", 10.0, 0.5, 0.5),
                                            Advertiser("a2", 4.0, 0.3, 0.3)};
    const auto eq = vcg_equivalence_check(worked);
    const bool worked_ok = std::abs(eq.ce_prices[0] - 2.4) <= 1e-12
                           && std::abs(eq.vcg_prices[0] - 2.4) <= 1e-12;
    const bool passed = worst_gap <= 1e-9 && worked_ok;
    return {"Equilibrium revenue equivalence with VCG", passed,
            "max per-position gap " + detail::fmt(worst_gap)
                + detail::over(config.equilibrium_instances)};
}

/// Monte-Carlo consistency: simulation lands within 4 standard errors of
/// the closed form, and replays are bit-identical under a fixed seed.
inline CheckResult check_monte_carlo(const CheckConfig& config) {
    std::size_t out_of_band = 0;
    double worst_z = 0.0;
    bool replay_ok = true;
    for (std::size_t i = 0; i < config.mc_rankings; ++i) {
        SplitMix64 rng(substream_seed(config.seed ^ 0x0a01, i));
        const auto entities = random_entities(rng, rng.next_in(1, 8));
        const Ranking ranking = Ranking::identity(entities);
        const double analytic = expected_utility(ranking).expected_utility;
        const std::uint64_t seed = rng.next_u64();
        const auto estimate = estimate_expected_utility(ranking, config.mc_trials, seed);
        if (estimate.std_error == 0.0) {
            if (estimate.mean_utility != analytic) ++out_of_band;
        } else {
            const double z = std::abs(estimate.mean_utility - analytic) / estimate.std_error;
            worst_z = std::max(worst_z, z);
            if (z > 4.0) ++out_of_band;
        }
        if (i == 0) {
            const auto replay = estimate_expected_utility(ranking, config.mc_trials, seed);
            replay_ok = replay.mean_utility == estimate.mean_utility
                        && replay.std_error == estimate.std_error
                        && replay.per_position_click_freq == estimate.per_position_click_freq;
        }
    }
    const bool passed = out_of_band == 0 && replay_ok;
    return {"Monte-Carlo consistency (4 sigma, deterministic replay)", passed,
            "worst |z| " + detail::fmt(worst_z) + ", " + std::to_string(out_of_band)
                + " out of band, replay " + (replay_ok ? "bit-identical" : "DIVERGED")
                + detail::over(config.mc_rankings)};
}

/// Hardness reduction: on small graphs the optimal diversity ranking
/// retains exactly a maximum independent set, and greedy never beats the
/// exact optimum.
inline CheckResult check_diversity_reduction(const CheckConfig& config) {
    std::size_t failures = 0;
    std::size_t graphs = 0;

    const auto examine = [&](const AdjacencyMatrix& adjacency, double u, double c, double g) {
        ++graphs;
        const auto instance = instance_from_graph(adjacency, u, c, g);
        const auto best = brute_force_diversity(instance);
        const auto kept = nonzero_residual_set(instance, best.order);
        const auto mis = max_independent_set_bruteforce(adjacency);
        if (kept.size() != mis.size()) ++failures;
        for (std::size_t a : kept)
            for (std::size_t b : kept)
                if (a != b && adjacency[a][b] != 0) ++failures;
        if (greedy_diversity(instance).value > best.value) ++failures;
    };

    const AdjacencyMatrix k3 = {{0, 1, 1}, {1, 0, 1}, {1, 1, 0}};
    const AdjacencyMatrix p3 = {{0, 1, 0}, {1, 0, 1}, {0, 1, 0}};
    const AdjacencyMatrix c5 = {{0, 1, 0, 0, 1},
                                {1, 0, 1, 0, 0},
                                {0, 1, 0, 1, 0},
                                {0, 0, 1, 0, 1},
                                {1, 0, 0, 1, 0}};
    const AdjacencyMatrix edgeless(4, std::vector<int>(4, 0));
    examine(k3, 1.0, 0.5, 0.1);
    examine(p3, 1.0, 0.5, 0.1);
    examine(c5, 1.0, 0.5, 0.1);
    examine(edgeless, 1.0, 0.5, 0.1);

    for (std::size_t i = 0; i < config.random_graphs; ++i) {
        SplitMix64 rng(substream_seed(config.seed ^ 0x0b01, i));
        const std::size_t n = rng.next_in(2, 8);
        const auto adjacency = random_graph(rng, n, rng.next_double(0.1, 0.9));
        const double c = rng.next_double(0.05, 0.95);
        examine(adjacency, rng.next_double(0.1, 5.0), c, rng.next_double() * (1.0 - c));
    }
    return {"Diversity / independent-set correspondence", failures == 0,
            std::to_string(failures) + " failures over " + std::to_string(graphs) + " graphs"};
}

/// Scenario and report round-trips are lossless and repeated command runs
/// produce byte-identical structured reports.
inline CheckResult check_roundtrip_determinism(const CheckConfig& config) {
    std::size_t failures = 0;

    RandomInstanceSpec spec;
    spec.count = config.io_roundtrips;
    spec.seed = config.seed ^ 0x0c01;
    for (ScenarioKind kind : {ScenarioKind::ranking, ScenarioKind::auction,
                               ScenarioKind::equilibrium, ScenarioKind::diversity}) {
        spec.kind = kind;
        for (const Scenario& scenario : generate_instances(spec)) {
            // Scenario JSON round-trip.
            const Json doc = scenario_to_json(scenario);
            const Scenario reloaded = scenario_from_json(Json::parse(doc.dump()));
            if (scenario_to_json(reloaded) != doc) ++failures;

            // Command determinism + structured report round-trip.
            const auto run_command = [&]() -> Report {
                switch (kind) {
                    case ScenarioKind::ranking:
                        return cmd_rank(scenario, RankingVariant::ce, std::nullopt, true).report;
                    case ScenarioKind::auction:
                        return cmd_auction(scenario, Mechanism::ce).report;
                    case ScenarioKind::equilibrium:
                        return cmd_equilibrium(scenario).report;
                    case ScenarioKind::diversity:
                        return cmd_diversity(scenario, DiversitySolver::greedy).report;
                }
                throw std::logic_error("unreachable");
            };
            const std::string first = format_report(run_command(), ReportFormat::structured);
            const std::string second = format_report(run_command(), ReportFormat::structured);
            if (first != second) ++failures;
            if (Json::parse(first) != run_command().data) ++failures;
        }
    }
    return {"Round-trip and determinism", failures == 0,
            std::to_string(failures) + " failures over "
                + std::to_string(4 * config.io_roundtrips) + " scenarios"};
}

inline std::vector<CheckResult> run_all_checks(const CheckConfig& config) {
    return {
        check_ce_optimality(config),
        check_adjacent_swaps(config),
        check_taxonomy_reductions(config),
        check_order_preservation(config),
        check_individual_rationality(config),
        check_mechanism_reductions(config),
        check_nash_equilibrium(config),
        check_vcg_dominance(config),
        check_vcg_equivalence(config),
        check_monte_carlo(config),
        check_diversity_reduction(config),
        check_roundtrip_determinism(config),
    };
}

/// Prints one line per check; returns 0 iff everything passed.
inline int print_check_table(const std::vector<CheckResult>& results, std::ostream& out) {
    bool all_passed = true;
    for (std::size_t i = 0; i < results.size(); ++i) {
        const CheckResult& r = results[i];
        all_passed = all_passed && r.passed;
        out << (r.passed ? "[PASS] " : "[FAIL] ") << (i + 1) << ". " << r.name << ": "
            << r.details << "\n";
    }
    out << (all_passed ? "all checks passed" : "CHECK FAILURES PRESENT") << "\n";
    return all_passed ? 0 : 1;
}

} // namespace ce
