#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

// Core cascade click model. A user walks a ranked list top to bottom; at
// each viewed entity they click (probability C), abandon the list
// (probability gamma) or continue (probability 1-C-gamma). Positions are
// 0-based throughout: position 0 is the top slot.

namespace ce {

/// Slack allowed when checking C + gamma <= 1. Violations beyond it are
/// rejected outright rather than clamped, so that downstream oracle
/// comparisons never see silently repaired inputs.
inline constexpr double kProbabilitySlack = 1e-12;

/// One rankable item: a document, an ad, or an advertiser's slot view.
/// `utility` is whatever the caller maximizes (relevance, CPC, private
/// value); `click_prob` is the perceived relevance / CTR conditional on
/// viewing; `abandon_prob` is the chance the user stops browsing here.
struct Entity {
    std::string id;
    double utility = 0.0;
    double click_prob = 0.0;
    double abandon_prob = 0.0;

    Entity(std::string id_, double utility_, double click_prob_, double abandon_prob_)
        : id(std::move(id_)), utility(utility_), click_prob(click_prob_), abandon_prob(abandon_prob_) {
        if (!std::isfinite(utility) || utility < 0.0)
            throw std::invalid_argument("entity '" + id + "': utility must be finite and >= 0");
        if (!std::isfinite(click_prob) || click_prob < 0.0 || click_prob > 1.0)
            throw std::invalid_argument("entity '" + id + "': click_prob must be in [0,1]");
        if (!std::isfinite(abandon_prob) || abandon_prob < 0.0 || abandon_prob > 1.0)
            throw std::invalid_argument("entity '" + id + "': abandon_prob must be in [0,1]");
        if (click_prob + abandon_prob > 1.0 + kProbabilitySlack)
            throw std::invalid_argument("entity '" + id + "': click_prob + abandon_prob exceeds 1");
    }
};

/// Absorption mass mu = C + gamma; 1 - mu is the continuation probability.
inline double absorption(const Entity& e) { return e.click_prob + e.abandon_prob; }

/// A permutation of entities materialized with everything the model needs
/// per position: utility, click probability, absorption and the cascade
/// view probability (prefix product of continuation probabilities).
class Ranking {
public:
    Ranking(std::span<const Entity> entities, std::vector<std::size_t> order)
        : order_(std::move(order)) {
        const std::size_t n = entities.size();
        if (order_.size() != n)
            throw std::invalid_argument("ranking: order length does not match entity count");
        std::vector<bool> seen(n, false);
        for (std::size_t idx : order_) {
            if (idx >= n || seen[idx])
                throw std::invalid_argument("ranking: order is not a permutation of entity indices");
            seen[idx] = true;
        }
        util_.reserve(n);
        click_.reserve(n);
        mu_.reserve(n);
        view_.reserve(n);
        double view = 1.0;
        for (std::size_t idx : order_) {
            const Entity& e = entities[idx];
            util_.push_back(e.utility);
            click_.push_back(e.click_prob);
            mu_.push_back(absorption(e));
            view_.push_back(view);
            view *= 1.0 - std::min(absorption(e), 1.0);
        }
    }

    /// Entities in their given order.
    static Ranking identity(std::span<const Entity> entities) {
        std::vector<std::size_t> order(entities.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        return Ranking(entities, std::move(order));
    }

    std::size_t size() const { return order_.size(); }
    const std::vector<std::size_t>& order() const { return order_; }

    /// Index (into the original entity list) of the entity at `pos`.
    std::size_t entity_at(std::size_t pos) const { return order_.at(pos); }

    /// Probability the user reaches position `pos`; the top slot is
    /// always viewed.
    double view_probability(std::size_t pos) const {
        check_position(pos);
        return view_[pos];
    }

    /// P_c at `pos`: click probability of the entity there times the
    /// probability of getting there.
    double click_probability(std::size_t pos) const {
        check_position(pos);
        return click_[pos] * view_[pos];
    }

    double utility_at(std::size_t pos) const { check_position(pos); return util_[pos]; }
    double click_prob_at(std::size_t pos) const { check_position(pos); return click_[pos]; }
    double absorption_at(std::size_t pos) const { check_position(pos); return mu_[pos]; }

    /// Probability the user walks off the end without clicking or
    /// abandoning.
    double exhaust_probability() const {
        if (order_.empty()) return 1.0;
        return view_.back() * (1.0 - std::min(mu_.back(), 1.0));
    }

private:
    void check_position(std::size_t pos) const {
        if (pos >= order_.size())
            throw std::out_of_range("ranking: position out of range");
    }

    std::vector<std::size_t> order_;
    std::vector<double> util_;
    std::vector<double> click_;
    std::vector<double> mu_;
    std::vector<double> view_;
};

/// Expected utility of a ranking plus its per-position breakdown.
struct UtilityReport {
    double expected_utility = 0.0;
    std::vector<double> per_position_contribution;
};

/// E(U) = sum over positions of U * C * prod_{above}(1 - mu). Pure
/// closed-form arithmetic; summed in position order so repeated calls are
/// bit-identical.
inline UtilityReport expected_utility(const Ranking& ranking) {
    UtilityReport report;
    report.per_position_contribution.reserve(ranking.size());
    for (std::size_t pos = 0; pos < ranking.size(); ++pos) {
        const double term = ranking.utility_at(pos) * ranking.click_probability(pos);
        report.per_position_contribution.push_back(term);
        report.expected_utility += term;
    }
    return report;
}

inline UtilityReport expected_utility(std::span<const Entity> entities,
                                      const std::vector<std::size_t>& order) {
    return expected_utility(Ranking(entities, order));
}

} // namespace ce
