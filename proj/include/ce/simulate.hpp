#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "ce/model.hpp"
#include "ce/random.hpp"

// Monte-Carlo walk of the browsing flow graph. Each trial consumes one
// uniform draw per viewed position, partitioned as [0,C) click,
// [C,C+gamma) abandon, rest continue. Trial k draws from the substream
// seed(master, k), so trials are order-independent and a fixed master
// seed reproduces the estimate bit for bit.

namespace ce {

enum class StepAction { clicked, abandoned, continued };
enum class TrialOutcome { clicked, abandoned, exhausted_list };

/// What the simulated user did at one viewed position. Presence of a
/// step means the position was viewed; a clicked/abandoned step is
/// always the last one (one click per session).
struct TrialStep {
    std::size_t position;
    StepAction action;
};

struct TrialTrace {
    std::vector<TrialStep> steps;
    TrialOutcome terminal = TrialOutcome::exhausted_list;
    std::size_t terminal_position = 0; ///< valid unless the list was exhausted
    double clicked_utility = 0.0;      ///< 0 when no click happened
};

/// Decision at one viewed position given the uniform draw for it.
inline StepAction step_action(const Ranking& ranking, std::size_t pos, double draw) {
    if (draw < ranking.click_prob_at(pos)) return StepAction::clicked;
    if (draw < ranking.absorption_at(pos)) return StepAction::abandoned;
    return StepAction::continued;
}

inline TrialTrace simulate_trial(const Ranking& ranking, SplitMix64& rng) {
    TrialTrace trace;
    for (std::size_t pos = 0; pos < ranking.size(); ++pos) {
        const StepAction action = step_action(ranking, pos, rng.next_double());
        trace.steps.push_back({pos, action});
        if (action == StepAction::clicked) {
            trace.terminal = TrialOutcome::clicked;
            trace.terminal_position = pos;
            trace.clicked_utility = ranking.utility_at(pos);
            return trace;
        }
        if (action == StepAction::abandoned) {
            trace.terminal = TrialOutcome::abandoned;
            trace.terminal_position = pos;
            return trace;
        }
    }
    trace.terminal = TrialOutcome::exhausted_list;
    return trace;
}

struct SimulationEstimate {
    double mean_utility = 0.0;
    double std_error = 0.0;
    std::size_t trials = 0;
    std::vector<double> per_position_click_freq;
};

/// Mean utility of the clicked entity over independent trials (0 when no
/// click). Aggregation runs in trial order with Welford updates, so the
/// result is deterministic for a given master seed.
inline SimulationEstimate estimate_expected_utility(const Ranking& ranking, std::size_t trials,
                                                    std::uint64_t master_seed) {
    if (trials == 0) throw std::invalid_argument("simulate: trials must be >= 1");

    double mean = 0.0;
    double m2 = 0.0;
    std::vector<std::size_t> clicks(ranking.size(), 0);

    for (std::size_t trial = 0; trial < trials; ++trial) {
        SplitMix64 rng(substream_seed(master_seed, trial));
        double utility = 0.0;
        for (std::size_t pos = 0; pos < ranking.size(); ++pos) {
            const StepAction action = step_action(ranking, pos, rng.next_double());
            if (action == StepAction::clicked) {
                utility = ranking.utility_at(pos);
                ++clicks[pos];
                break;
            }
            if (action == StepAction::abandoned) break;
        }
        const double delta = utility - mean;
        mean += delta / static_cast<double>(trial + 1);
        m2 += delta * (utility - mean);
    }

    SimulationEstimate est;
    est.mean_utility = mean;
    est.trials = trials;
    if (trials > 1)
        est.std_error = std::sqrt(m2 / static_cast<double>(trials - 1))
                        / std::sqrt(static_cast<double>(trials));
    est.per_position_click_freq.reserve(ranking.size());
    for (std::size_t count : clicks)
        est.per_position_click_freq.push_back(static_cast<double>(count)
                                              / static_cast<double>(trials));
    return est;
}

} // namespace ce
