#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ce/equilibrium.hpp"
#include "ce/report.hpp"
#include "ce/scenario.hpp"
#include "ce/simulate.hpp"

// Command implementations behind the CLI. Each returns the finished
// report plus the process exit code: 0 on success, 1 when a verification
// embedded in the command fails (equilibrium not envy-free, reduction
// mismatch), while schema/usage problems throw and exit 2 in the driver.

namespace ce {

struct CommandResult {
    Report report;
    int exit_code = 0;
};

namespace detail {

inline void require_kind(const Scenario& scenario, ScenarioKind kind, const char* command) {
    if (scenario.kind != kind)
        throw ScenarioError(std::string(command) + ": expected a '" + kind_name(kind)
                            + "' scenario, got '" + kind_name(scenario.kind) + "'");
}

inline Json ranking_positions(const Scenario& scenario, const Ranking& ranking,
                              const std::vector<double>& scores) {
    Json positions = Json::array();
    for (std::size_t pos = 0; pos < ranking.size(); ++pos) {
        const std::size_t idx = ranking.entity_at(pos);
        positions.push_back(Json{{"position", pos + 1},
                                 {"id", scenario.entities[idx].id},
                                 {"score", scores[idx]},
                                 {"price", nullptr},
                                 {"click_prob", ranking.click_probability(pos)},
                                 {"contribution",
                                  ranking.utility_at(pos) * ranking.click_probability(pos)}});
    }
    return positions;
}

inline Json outcome_positions(std::span<const Advertiser> ads, const AuctionOutcome& outcome) {
    Json positions = Json::array();
    for (std::size_t pos = 0; pos < outcome.allocation.size(); ++pos) {
        const Advertiser& a = ads[outcome.allocation[pos]];
        positions.push_back(Json{{"position", pos + 1},
                                 {"id", a.id},
                                 {"score", outcome.rank_scores[pos]},
                                 {"price", outcome.prices[pos]},
                                 {"click_prob", outcome.click_probs[pos]},
                                 {"contribution",
                                  outcome.prices[pos] * outcome.click_probs[pos]}});
    }
    return positions;
}

} // namespace detail

/// rank: order the scenario's entities by a taxonomy variant and report
/// scores, click probabilities and expected utility; with `oracle` the
/// brute-force optimum and the gap to it are included.
inline CommandResult cmd_rank(const Scenario& scenario, RankingVariant variant,
                              std::optional<double> k_override = std::nullopt,
                              bool oracle = false) {
    detail::require_kind(scenario, ScenarioKind::ranking, "rank");
    std::optional<double> k = k_override ? k_override : scenario.k;
    if (variant_requires_k(variant) && !k)
        throw ScenarioError("rank: variant r2_over_k requires k (scenario field or --k)");

    const auto scores = variant_scores(scenario.entities, variant, k);
    const Ranking ranking(scenario.entities, argsort_descending(scores));
    const UtilityReport utility = expected_utility(ranking);

    Report report;
    report.data["format_version"] = kFormatVersion;
    report.data["command"] = "rank";
    report.data["variant"] = variant_name(variant);
    if (k) report.data["k"] = *k;
    report.data["expected_utility"] = utility.expected_utility;
    report.data["positions"] = detail::ranking_positions(scenario, ranking, scores);
    if (oracle) {
        const BruteForceResult best = brute_force_optimal(scenario.entities);
        report.data["oracle"] = Json{{"value", best.value},
                                     {"gap", best.value - utility.expected_utility}};
    }
    return {std::move(report), 0};
}

/// auction: run one mechanism over the scenario's advertisers and bids.
inline CommandResult cmd_auction(const Scenario& scenario, Mechanism mechanism) {
    detail::require_kind(scenario, ScenarioKind::auction, "auction");
    const BidVector bids(*scenario.bids);
    const AuctionOutcome outcome = run_auction(scenario.advertisers, bids, mechanism);

    Report report;
    report.data["format_version"] = kFormatVersion;
    report.data["command"] = "auction";
    report.data["mechanism"] = mechanism_name(mechanism);
    report.data["positions"] = detail::outcome_positions(scenario.advertisers, outcome);
    report.data["se_revenue"] = outcome.se_revenue;
    report.data["total_revenue"] = outcome.total_revenue;
    Json profits = Json::array();
    for (std::size_t i = 0; i < scenario.advertisers.size(); ++i)
        profits.push_back(Json{{"id", scenario.advertisers[i].id},
                               {"bid", bids[i]},
                               {"profit", outcome.advertiser_profits[i]}});
    report.data["advertisers"] = std::move(profits);
    return {std::move(report), 0};
}

/// equilibrium: verify the scenario's bids (or, when absent, the
/// closed-form equilibrium bids) by exhaustive deviation search. Exit
/// code 1 when the bid vector is not envy-free.
inline CommandResult cmd_equilibrium(const Scenario& scenario, double tolerance = 1e-9) {
    detail::require_kind(scenario, ScenarioKind::equilibrium, "equilibrium");
    const bool computed = !scenario.bids.has_value();
    const BidVector bids =
        computed ? equilibrium_bids(scenario.advertisers) : BidVector(*scenario.bids);
    const EquilibriumReport eq = verify_equilibrium(scenario.advertisers, bids, tolerance);
    const AuctionOutcome outcome = run_ce_auction(scenario.advertisers, bids);

    Report report;
    report.data["format_version"] = kFormatVersion;
    report.data["command"] = "equilibrium";
    report.data["bids_source"] = computed ? "computed" : "scenario";
    report.data["tolerance"] = tolerance;
    Json bid_list = Json::array();
    for (std::size_t i = 0; i < scenario.advertisers.size(); ++i)
        bid_list.push_back(Json{{"id", scenario.advertisers[i].id}, {"bid", bids[i]}});
    report.data["bids"] = std::move(bid_list);
    report.data["is_envy_free"] = eq.is_envy_free;
    report.data["worst_violation"] = eq.worst_violation;
    report.data["se_revenue"] = eq.se_revenue;
    report.data["total_revenue"] = outcome.total_revenue;
    report.data["social_revenue"] = eq.social_revenue;
    report.data["vcg_truthful_revenue"] = eq.vcg_truthful_revenue;
    report.data["positions"] = detail::outcome_positions(scenario.advertisers, outcome);

    // Exact ties in the pricing order make "who prices whom" ambiguous up
    // to the stable tie-break; surface them rather than hide them.
    Json ties = Json::array();
    for (std::size_t pos = 0; pos + 1 < outcome.rank_scores.size(); ++pos)
        if (outcome.rank_scores[pos] == outcome.rank_scores[pos + 1])
            ties.push_back(Json{{"position", pos + 1}, {"tied_with_position", pos + 2}});
    if (!ties.empty()) report.data["ties"] = std::move(ties);

    return {std::move(report), eq.is_envy_free ? 0 : 1};
}

/// equilibrium --batch: verify the closed-form bids over a seeded batch of
/// random instances and report aggregate counts. Exit 1 if any instance
/// fails verification.
inline CommandResult cmd_equilibrium_batch(std::size_t count, std::uint64_t seed,
                                           double tolerance = 1e-9) {
    if (count == 0) throw ScenarioError("equilibrium: batch count must be >= 1");
    RandomInstanceSpec spec;
    spec.kind = ScenarioKind::equilibrium;
    spec.count = count;
    spec.n_min = 1;
    spec.n_max = 8;
    spec.seed = seed;

    std::size_t envy_free = 0;
    double worst = -std::numeric_limits<double>::infinity();
    for (const Scenario& instance : generate_instances(spec)) {
        const EquilibriumReport eq =
            verify_equilibrium(instance.advertisers, equilibrium_bids(instance.advertisers),
                               tolerance);
        if (eq.is_envy_free) ++envy_free;
        worst = std::max(worst, eq.worst_violation);
    }

    Report report;
    report.data["format_version"] = kFormatVersion;
    report.data["command"] = "equilibrium";
    report.data["batch"] = count;
    report.data["seed"] = seed;
    report.data["tolerance"] = tolerance;
    report.data["envy_free_count"] = envy_free;
    report.data["failure_count"] = count - envy_free;
    report.data["worst_violation"] = worst;
    return {std::move(report), envy_free == count ? 0 : 1};
}

/// simulate: Monte-Carlo estimate of the scenario list (in given order)
/// against the analytic value, with the z-score of the gap.
inline CommandResult cmd_simulate(const Scenario& scenario,
                                  std::optional<std::size_t> trials_override = std::nullopt,
                                  std::optional<std::uint64_t> seed_override = std::nullopt) {
    detail::require_kind(scenario, ScenarioKind::ranking, "simulate");
    SimulationBlock block = scenario.simulation.value_or(SimulationBlock{});
    if (trials_override) block.trials = *trials_override;
    if (seed_override) block.seed = *seed_override;
    if (block.trials == 0) throw ScenarioError("simulate: trials must be >= 1");

    const Ranking ranking = Ranking::identity(scenario.entities);
    const UtilityReport analytic = expected_utility(ranking);
    const SimulationEstimate estimate =
        estimate_expected_utility(ranking, block.trials, block.seed);
    const double gap = estimate.mean_utility - analytic.expected_utility;
    const double z = estimate.std_error > 0.0 ? gap / estimate.std_error : 0.0;

    Report report;
    report.data["format_version"] = kFormatVersion;
    report.data["command"] = "simulate";
    report.data["trials"] = block.trials;
    report.data["seed"] = block.seed;
    report.data["analytic_expected_utility"] = analytic.expected_utility;
    report.data["simulated_mean_utility"] = estimate.mean_utility;
    report.data["std_error"] = estimate.std_error;
    report.data["z_score"] = z;
    Json positions = Json::array();
    for (std::size_t pos = 0; pos < ranking.size(); ++pos) {
        positions.push_back(
            Json{{"position", pos + 1},
                 {"id", scenario.entities[ranking.entity_at(pos)].id},
                 {"score", nullptr},
                 {"price", nullptr},
                 {"click_prob", ranking.click_probability(pos)},
                 {"contribution", ranking.utility_at(pos) * ranking.click_probability(pos)},
                 {"click_freq", estimate.per_position_click_freq[pos]}});
    }
    report.data["positions"] = std::move(positions);
    return {std::move(report), 0};
}

enum class DiversitySolver { brute, greedy };

inline std::optional<DiversitySolver> parse_solver(std::string_view name) {
    if (name == "brute") return DiversitySolver::brute;
    if (name == "greedy") return DiversitySolver::greedy;
    return std::nullopt;
}

/// diversity: solve the residual-utility ranking with the chosen solver.
/// Graph scenarios additionally compare the retained top set against the
/// maximum independent set; a mismatch under the exact solver exits 1.
inline CommandResult cmd_diversity(const Scenario& scenario, DiversitySolver solver) {
    detail::require_kind(scenario, ScenarioKind::diversity, "diversity");
    const DiversityInstance instance = scenario.diversity_instance();
    const BruteForceResult solved = solver == DiversitySolver::brute
                                        ? brute_force_diversity(instance)
                                        : greedy_diversity(instance);

    Report report;
    report.data["format_version"] = kFormatVersion;
    report.data["command"] = "diversity";
    report.data["solver"] = solver == DiversitySolver::brute ? "brute" : "greedy";
    report.data["objective"] = solved.value;

    const std::vector<double> residual = residual_utilities(instance, solved.order);
    Json positions = Json::array();
    double view = 1.0;
    for (std::size_t pos = 0; pos < solved.order.size(); ++pos) {
        const Entity& e = instance.entities[solved.order[pos]];
        const double pc = e.click_prob * view;
        positions.push_back(Json{{"position", pos + 1},
                                 {"id", e.id},
                                 {"score", residual[pos]},
                                 {"price", nullptr},
                                 {"click_prob", pc},
                                 {"contribution", residual[pos] * pc}});
        view *= 1.0 - std::min(absorption(e), 1.0);
    }
    report.data["positions"] = std::move(positions);

    int exit_code = 0;
    if (scenario.adjacency) {
        const auto mis = max_independent_set_bruteforce(*scenario.adjacency);
        const auto kept = nonzero_residual_set(instance, solved.order);
        report.data["independent_set_size"] = mis.size();
        report.data["retained_set_size"] = kept.size();
        if (solver == DiversitySolver::brute) {
            const bool match = kept.size() == mis.size();
            report.data["correspondence"] = match ? "match" : "mismatch";
            if (!match) exit_code = 1;
        }
    }
    return {std::move(report), exit_code};
}

/// compare: run two mechanisms (auction/equilibrium scenarios) or two
/// ranking variants (ranking scenarios) side by side.
inline CommandResult cmd_compare(const Scenario& scenario, const std::string& first,
                                 const std::string& second) {
    Report report;
    report.data["format_version"] = kFormatVersion;
    report.data["command"] = "compare";

    if (scenario.kind == ScenarioKind::ranking) {
        const auto va = parse_variant(first);
        const auto vb = parse_variant(second);
        if (!va || !vb)
            throw ScenarioError("compare: unknown ranking variant '" + (va ? second : first)
                                + "'");
        if (variant_requires_k(*va) || variant_requires_k(*vb)) {
            if (!scenario.k)
                throw ScenarioError("compare: variant r2_over_k requires k in the scenario");
        }
        const auto result_of = [&](RankingVariant v) {
            const auto ranking = rank_by_variant(scenario.entities, v, scenario.k);
            Json ids = Json::array();
            for (std::size_t pos = 0; pos < ranking.size(); ++pos)
                ids.push_back(scenario.entities[ranking.entity_at(pos)].id);
            return Json{{"variant", variant_name(v)},
                        {"order", std::move(ids)},
                        {"expected_utility", expected_utility(ranking).expected_utility}};
        };
        report.data["left"] = result_of(*va);
        report.data["right"] = result_of(*vb);
        report.data["expected_utility_gap"] =
            report.data["left"]["expected_utility"].get<double>()
            - report.data["right"]["expected_utility"].get<double>();
        return {std::move(report), 0};
    }

    if (scenario.kind == ScenarioKind::auction || scenario.kind == ScenarioKind::equilibrium) {
        const auto ma = parse_mechanism(first);
        const auto mb = parse_mechanism(second);
        if (!ma || !mb)
            throw ScenarioError("compare: unknown mechanism '" + (ma ? second : first) + "'");
        const BidVector bids = scenario.bids ? BidVector(*scenario.bids)
                                             : equilibrium_bids(scenario.advertisers);
        const auto run = [&](Mechanism m) { return run_auction(scenario.advertisers, bids, m); };
        const AuctionOutcome a = run(*ma);
        const AuctionOutcome b = run(*mb);

        Json rows = Json::array();
        double max_gap = 0.0;
        for (std::size_t pos = 0; pos < a.prices.size(); ++pos) {
            const double gap = a.prices[pos] - b.prices[pos];
            max_gap = std::max(max_gap, std::abs(gap));
            rows.push_back(Json{{"position", pos + 1},
                                {"id", scenario.advertisers[a.allocation[pos]].id},
                                {"left_price", a.prices[pos]},
                                {"right_price", b.prices[pos]},
                                {"price_gap", gap}});
        }
        report.data["left"] = Json{{"mechanism", mechanism_name(*ma)},
                                   {"se_revenue", a.se_revenue}};
        report.data["right"] = Json{{"mechanism", mechanism_name(*mb)},
                                    {"se_revenue", b.se_revenue}};
        report.data["prices"] = std::move(rows);
        report.data["max_abs_price_gap"] = max_gap;
        report.data["same_allocation"] = a.allocation == b.allocation;
        return {std::move(report), 0};
    }

    throw ScenarioError("compare: diversity scenarios are not comparable; use the diversity command");
}

} // namespace ce
