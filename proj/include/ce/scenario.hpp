#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "ce/auction.hpp"
#include "ce/diversity.hpp"
#include "ce/generate.hpp"
#include "ce/model.hpp"
#include "ce/random.hpp"

// Scenario files: JSON documents describing one ranking, auction,
// equilibrium or diversity problem. Every probability invariant is
// enforced at load time and violations name the offending field.
// Schema version field "format_version" starts at 1.

namespace ce {

using Json = nlohmann::ordered_json;

inline constexpr int kFormatVersion = 1;

/// Malformed or invariant-violating scenario/report input.
struct ScenarioError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ScenarioKind { ranking, auction, equilibrium, diversity };

inline const char* kind_name(ScenarioKind kind) {
    switch (kind) {
        case ScenarioKind::ranking: return "ranking";
        case ScenarioKind::auction: return "auction";
        case ScenarioKind::equilibrium: return "equilibrium";
        case ScenarioKind::diversity: return "diversity";
    }
    return "?";
}

struct SimulationBlock {
    std::size_t trials = 100000;
    std::uint64_t seed = 1;
};

struct Scenario {
    ScenarioKind kind = ScenarioKind::ranking;
    std::vector<Entity> entities;        ///< ranking / diversity kinds
    std::vector<Advertiser> advertisers; ///< auction / equilibrium kinds
    std::optional<std::vector<double>> bids;
    std::optional<double> k; ///< taxonomy constant
    std::optional<std::vector<std::vector<double>>> similarity;
    std::optional<AdjacencyMatrix> adjacency;
    ResidualRule residual_rule = ResidualRule::zero_if_duplicate_above;
    std::optional<SimulationBlock> simulation;

    std::size_t size() const {
        return kind == ScenarioKind::auction || kind == ScenarioKind::equilibrium
                   ? advertisers.size()
                   : entities.size();
    }

    /// The diversity instance this scenario describes (diversity kind only).
    DiversityInstance diversity_instance() const {
        if (adjacency) {
            if (entities.size() != 1)
                throw ScenarioError("diversity: adjacency scenarios carry one uniform entity");
            const Entity& u = entities.front();
            return instance_from_graph(*adjacency, u.utility, u.click_prob, u.abandon_prob);
        }
        if (!similarity) throw ScenarioError("diversity: similarity matrix missing");
        return DiversityInstance(entities, *similarity, residual_rule);
    }
};

namespace detail {

inline const Json& require_field(const Json& obj, const char* name, const std::string& path) {
    if (!obj.is_object())
        throw ScenarioError(path + ": expected an object");
    const auto it = obj.find(name);
    if (it == obj.end())
        throw ScenarioError(path + ": missing required field '" + name + "'");
    return *it;
}

inline double as_number(const Json& value, const std::string& path) {
    if (!value.is_number()) throw ScenarioError(path + ": expected a number");
    return value.get<double>();
}

inline std::uint64_t as_unsigned(const Json& value, const std::string& path) {
    if (value.is_number_unsigned()) return value.get<std::uint64_t>();
    if (value.is_number_integer() && value.get<std::int64_t>() >= 0)
        return static_cast<std::uint64_t>(value.get<std::int64_t>());
    throw ScenarioError(path + ": expected a non-negative integer");
}

inline std::string as_string(const Json& value, const std::string& path) {
    if (!value.is_string()) throw ScenarioError(path + ": expected a string");
    return value.get<std::string>();
}

inline Entity parse_entity(const Json& obj, const std::string& path) {
    const std::string id = as_string(require_field(obj, "id", path), path + ".id");
    const double utility = as_number(require_field(obj, "utility", path), path + ".utility");
    const double click = as_number(require_field(obj, "click_prob", path), path + ".click_prob");
    const double abandon =
        as_number(require_field(obj, "abandon_prob", path), path + ".abandon_prob");
    try {
        return Entity(id, utility, click, abandon);
    } catch (const std::invalid_argument& e) {
        throw ScenarioError(path + ": " + e.what());
    }
}

inline Advertiser parse_advertiser(const Json& obj, const std::string& path) {
    const std::string id = as_string(require_field(obj, "id", path), path + ".id");
    const double value = as_number(require_field(obj, "value", path), path + ".value");
    const double ctr = as_number(require_field(obj, "ctr", path), path + ".ctr");
    const double abandon =
        as_number(require_field(obj, "abandon_prob", path), path + ".abandon_prob");
    try {
        return Advertiser(id, value, ctr, abandon);
    } catch (const std::invalid_argument& e) {
        throw ScenarioError(path + ": " + e.what());
    }
}

inline std::vector<std::vector<double>> parse_matrix(const Json& value, const std::string& path) {
    if (!value.is_array()) throw ScenarioError(path + ": expected an array of rows");
    std::vector<std::vector<double>> matrix;
    for (std::size_t i = 0; i < value.size(); ++i) {
        const Json& row = value[i];
        const std::string row_path = path + "[" + std::to_string(i) + "]";
        if (!row.is_array()) throw ScenarioError(row_path + ": expected an array");
        std::vector<double> out;
        for (std::size_t j = 0; j < row.size(); ++j)
            out.push_back(as_number(row[j], row_path + "[" + std::to_string(j) + "]"));
        matrix.push_back(std::move(out));
    }
    return matrix;
}

} // namespace detail

inline Scenario scenario_from_json(const Json& doc) {
    using detail::as_number;
    using detail::as_string;
    using detail::as_unsigned;
    using detail::require_field;

    if (!doc.is_object()) throw ScenarioError("scenario: expected a JSON object");
    const auto version = as_unsigned(require_field(doc, "format_version", "scenario"),
                                     "scenario.format_version");
    if (version != kFormatVersion)
        throw ScenarioError("scenario.format_version: unsupported version "
                            + std::to_string(version));

    Scenario scenario;
    const std::string kind = as_string(require_field(doc, "kind", "scenario"), "scenario.kind");
    if (kind == "ranking") scenario.kind = ScenarioKind::ranking;
    else if (kind == "auction") scenario.kind = ScenarioKind::auction;
    else if (kind == "equilibrium") scenario.kind = ScenarioKind::equilibrium;
    else if (kind == "diversity") scenario.kind = ScenarioKind::diversity;
    else throw ScenarioError("scenario.kind: unknown kind '" + kind + "'");

    const bool wants_ads =
        scenario.kind == ScenarioKind::auction || scenario.kind == ScenarioKind::equilibrium;

    if (wants_ads) {
        const Json& ads = require_field(doc, "advertisers", "scenario");
        if (!ads.is_array() || ads.empty())
            throw ScenarioError("scenario.advertisers: expected a non-empty array");
        for (std::size_t i = 0; i < ads.size(); ++i)
            scenario.advertisers.push_back(
                detail::parse_advertiser(ads[i], "advertisers[" + std::to_string(i) + "]"));
    } else {
        const Json& entities = require_field(doc, "entities", "scenario");
        if (!entities.is_array() || entities.empty())
            throw ScenarioError("scenario.entities: expected a non-empty array");
        for (std::size_t i = 0; i < entities.size(); ++i)
            scenario.entities.push_back(
                detail::parse_entity(entities[i], "entities[" + std::to_string(i) + "]"));
    }

    if (doc.contains("bids")) {
        const Json& bids = doc["bids"];
        if (!bids.is_array()) throw ScenarioError("scenario.bids: expected an array");
        std::vector<double> values;
        for (std::size_t i = 0; i < bids.size(); ++i)
            values.push_back(as_number(bids[i], "bids[" + std::to_string(i) + "]"));
        try {
            [[maybe_unused]] BidVector check(values);
        } catch (const std::invalid_argument& e) {
            throw ScenarioError(std::string("scenario.") + e.what());
        }
        scenario.bids = std::move(values);
    }
    if (scenario.kind == ScenarioKind::auction) {
        if (!scenario.bids) throw ScenarioError("scenario: auction scenarios require 'bids'");
        if (scenario.bids->size() != scenario.advertisers.size())
            throw ScenarioError("scenario.bids: bid count does not match advertiser count");
    }
    if (scenario.bids && wants_ads && scenario.bids->size() != scenario.advertisers.size())
        throw ScenarioError("scenario.bids: bid count does not match advertiser count");

    if (doc.contains("k")) {
        const double k = as_number(doc["k"], "scenario.k");
        if (!(k > 0.0 && k <= 1.0)) throw ScenarioError("scenario.k: must be in (0,1]");
        scenario.k = k;
    }

    if (doc.contains("residual_rule")) {
        const std::string rule = as_string(doc["residual_rule"], "scenario.residual_rule");
        if (rule == "zero_if_duplicate_above")
            scenario.residual_rule = ResidualRule::zero_if_duplicate_above;
        else if (rule == "linear_discount")
            scenario.residual_rule = ResidualRule::linear_discount;
        else
            throw ScenarioError("scenario.residual_rule: unknown rule '" + rule + "'");
    }

    if (doc.contains("similarity"))
        scenario.similarity = detail::parse_matrix(doc["similarity"], "similarity");

    if (doc.contains("adjacency")) {
        const auto matrix = detail::parse_matrix(doc["adjacency"], "adjacency");
        AdjacencyMatrix adjacency;
        for (std::size_t i = 0; i < matrix.size(); ++i) {
            std::vector<int> row;
            for (std::size_t j = 0; j < matrix[i].size(); ++j) {
                const double v = matrix[i][j];
                if (v != 0.0 && v != 1.0)
                    throw ScenarioError("adjacency[" + std::to_string(i) + "]["
                                        + std::to_string(j) + "]: entries must be 0 or 1");
                row.push_back(static_cast<int>(v));
            }
            adjacency.push_back(std::move(row));
        }
        try {
            validate_adjacency(adjacency);
        } catch (const std::invalid_argument& e) {
            throw ScenarioError(std::string("adjacency: ") + e.what());
        }
        scenario.adjacency = std::move(adjacency);
    }

    if (scenario.kind == ScenarioKind::diversity) {
        if (scenario.adjacency) {
            if (scenario.entities.size() != 1)
                throw ScenarioError(
                    "scenario.entities: adjacency scenarios carry exactly one uniform entity");
        } else if (!scenario.similarity) {
            throw ScenarioError("scenario: diversity scenarios require 'similarity' or 'adjacency'");
        } else {
            try {
                [[maybe_unused]] DiversityInstance check(scenario.entities, *scenario.similarity,
                                                         scenario.residual_rule);
            } catch (const std::invalid_argument& e) {
                throw ScenarioError(std::string("similarity: ") + e.what());
            }
        }
    }

    if (doc.contains("simulation")) {
        const Json& sim = doc["simulation"];
        SimulationBlock block;
        block.trials = as_unsigned(require_field(sim, "trials", "simulation"), "simulation.trials");
        if (block.trials == 0) throw ScenarioError("simulation.trials: must be >= 1");
        block.seed = as_unsigned(require_field(sim, "seed", "simulation"), "simulation.seed");
        scenario.simulation = block;
    }

    return scenario;
}

inline Json scenario_to_json(const Scenario& scenario) {
    Json doc;
    doc["format_version"] = kFormatVersion;
    doc["kind"] = kind_name(scenario.kind);
    if (scenario.kind == ScenarioKind::auction || scenario.kind == ScenarioKind::equilibrium) {
        Json ads = Json::array();
        for (const Advertiser& a : scenario.advertisers)
            ads.push_back(Json{{"id", a.id},
                               {"value", a.value},
                               {"ctr", a.ctr},
                               {"abandon_prob", a.abandon_prob}});
        doc["advertisers"] = std::move(ads);
    } else {
        Json entities = Json::array();
        for (const Entity& e : scenario.entities)
            entities.push_back(Json{{"id", e.id},
                                    {"utility", e.utility},
                                    {"click_prob", e.click_prob},
                                    {"abandon_prob", e.abandon_prob}});
        doc["entities"] = std::move(entities);
    }
    if (scenario.bids) doc["bids"] = *scenario.bids;
    if (scenario.k) doc["k"] = *scenario.k;
    if (scenario.kind == ScenarioKind::diversity)
        doc["residual_rule"] = scenario.residual_rule == ResidualRule::zero_if_duplicate_above
                                   ? "zero_if_duplicate_above"
                                   : "linear_discount";
    if (scenario.similarity) doc["similarity"] = *scenario.similarity;
    if (scenario.adjacency) doc["adjacency"] = *scenario.adjacency;
    if (scenario.simulation)
        doc["simulation"] =
            Json{{"trials", scenario.simulation->trials}, {"seed", scenario.simulation->seed}};
    return doc;
}

inline Scenario load_scenario_from_string(const std::string& text) {
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ScenarioError(std::string("scenario: parse error: ") + e.what());
    }
    return scenario_from_json(doc);
}

inline Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("scenario: cannot open '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return load_scenario_from_string(buffer.str());
}

inline void save_scenario(const Scenario& scenario, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ScenarioError("scenario: cannot write '" + path.string() + "'");
    out << scenario_to_json(scenario).dump(2) << '\n';
}

/// Deterministic scenario batches for property sweeps.
struct RandomInstanceSpec {
    ScenarioKind kind = ScenarioKind::ranking;
    std::size_t count = 1;
    std::size_t n_min = 2;
    std::size_t n_max = 8;
    std::uint64_t seed = 1;
    ParameterRanges ranges;
    double bid_lo = 0.1;
    double bid_hi = 10.0;
    double edge_prob = 0.3; ///< diversity kind: graph density

    RandomInstanceSpec() = default;
};

inline std::vector<Scenario> generate_instances(const RandomInstanceSpec& spec) {
    if (spec.n_min < 1 || spec.n_max < spec.n_min)
        throw std::invalid_argument("generate: need 1 <= n_min <= n_max");
    std::vector<Scenario> scenarios;
    scenarios.reserve(spec.count);
    for (std::size_t index = 0; index < spec.count; ++index) {
        SplitMix64 rng(substream_seed(spec.seed, index));
        const std::size_t n = rng.next_in(spec.n_min, spec.n_max);
        Scenario scenario;
        scenario.kind = spec.kind;
        switch (spec.kind) {
            case ScenarioKind::ranking:
                scenario.entities = random_entities(rng, n, spec.ranges);
                break;
            case ScenarioKind::auction:
            case ScenarioKind::equilibrium: {
                scenario.advertisers = random_advertisers(rng, n, spec.ranges);
                if (spec.kind == ScenarioKind::auction)
                    scenario.bids = random_bids(rng, n, spec.bid_lo, spec.bid_hi).values();
                break;
            }
            case ScenarioKind::diversity: {
                scenario.adjacency = random_graph(rng, n, spec.edge_prob);
                scenario.entities.push_back(
                    random_entity(rng, spec.ranges, "uniform"));
                break;
            }
        }
        scenarios.push_back(std::move(scenario));
    }
    return scenarios;
}

} // namespace ce
