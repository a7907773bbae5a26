// Command-line driver: rank, auction, equilibrium, simulate, diversity,
// compare and selfcheck over JSON scenario files.
//
// Exit codes: 0 success, 1 verification failure (equilibrium not
// envy-free, correspondence mismatch, selfcheck failure), 2 usage or
// schema error.

#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "ce/checks.hpp"
#include "ce/commands.hpp"

namespace {

struct CliOptions {
    std::string scenario_path;
    std::string variant = "ce";
    std::string mechanism = "ce";
    std::string solver = "greedy";
    std::string format = "structured";
    std::string out_path;
    std::string compare_left;
    std::string compare_right;
    std::optional<std::size_t> trials;
    std::optional<std::uint64_t> seed;
    std::optional<double> k;
    double tolerance = 1e-9;
    bool oracle = false;
    bool full_scale = false;
};

void add_output_flags(CLI::App* cmd, CliOptions& opt) {
    cmd->add_option("--out", opt.out_path, "write the report to this path instead of stdout");
    cmd->add_option("--format", opt.format, "report format")
        ->check(CLI::IsMember({"structured", "tabular"}));
}

int emit(const ce::CommandResult& result, const CliOptions& opt) {
    const auto format = ce::parse_report_format(opt.format);
    const std::string text = ce::format_report(result.report, *format);
    if (opt.out_path.empty()) {
        std::cout << text;
    } else {
        ce::write_report(result.report, opt.out_path, *format);
    }
    return result.exit_code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"click-efficiency ranking, auction and diversity toolkit"};
    app.require_subcommand(1);
    CliOptions opt;

    CLI::App* rank = app.add_subcommand("rank", "rank a scenario's entities by a taxonomy variant");
    rank->add_option("--scenario", opt.scenario_path, "scenario file")->required();
    rank->add_option("--variant", opt.variant,
                     "ce|prp|r2_over_k|perceived_times_actual|abandonment_aware|bid_order|"
                     "expected_profit|social_optimal");
    rank->add_option("--k", opt.k, "taxonomy constant override");
    rank->add_flag("--oracle", opt.oracle, "also run the brute-force oracle and report the gap");
    add_output_flags(rank, opt);

    CLI::App* auction = app.add_subcommand("auction", "run one auction mechanism");
    auction->add_option("--scenario", opt.scenario_path, "scenario file")->required();
    auction->add_option("--mechanism", opt.mechanism, "ce|gsp|overture|vcg");
    add_output_flags(auction, opt);

    CLI::App* equilibrium =
        app.add_subcommand("equilibrium", "compute/verify the envy-free equilibrium");
    equilibrium->add_option("--scenario", opt.scenario_path, "scenario file");
    equilibrium->add_option("--tolerance", opt.tolerance, "profit-gain tolerance");
    std::size_t batch = 0;
    equilibrium->add_option("--batch", batch,
                            "verify a seeded batch of random instances instead of a scenario");
    equilibrium->add_option("--seed", opt.seed, "batch master seed");
    add_output_flags(equilibrium, opt);

    CLI::App* simulate = app.add_subcommand("simulate", "Monte-Carlo check of the click model");
    simulate->add_option("--scenario", opt.scenario_path, "scenario file")->required();
    simulate->add_option("--trials", opt.trials, "trial count override");
    simulate->add_option("--seed", opt.seed, "master seed override");
    add_output_flags(simulate, opt);

    CLI::App* diversity = app.add_subcommand("diversity", "residual-utility diversity ranking");
    diversity->add_option("--scenario", opt.scenario_path, "scenario file")->required();
    diversity->add_option("--solver", opt.solver, "brute|greedy")
        ->check(CLI::IsMember({"brute", "greedy"}));
    add_output_flags(diversity, opt);

    CLI::App* compare =
        app.add_subcommand("compare", "run two mechanisms or variants side by side");
    compare->add_option("--scenario", opt.scenario_path, "scenario file")->required();
    compare->add_option("--left", opt.compare_left, "first mechanism/variant");
    compare->add_option("--right", opt.compare_right, "second mechanism/variant");
    add_output_flags(compare, opt);

    CLI::App* selfcheck =
        app.add_subcommand("selfcheck", "run the property suite at reduced scale");
    selfcheck->add_flag("--full", opt.full_scale, "run at full acceptance scale");
    selfcheck->add_option("--seed", opt.seed, "master seed override");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : 2;
    }

    try {
        if (selfcheck->parsed()) {
            ce::CheckConfig config =
                opt.full_scale ? ce::CheckConfig{} : ce::CheckConfig::reduced();
            if (opt.seed) config.seed = *opt.seed;
            return ce::print_check_table(ce::run_all_checks(config), std::cout);
        }

        if (equilibrium->parsed() && batch > 0)
            return emit(ce::cmd_equilibrium_batch(batch, opt.seed.value_or(1), opt.tolerance),
                        opt);
        if (opt.scenario_path.empty())
            throw ce::ScenarioError("equilibrium: provide --scenario or --batch");

        const ce::Scenario scenario = ce::load_scenario(opt.scenario_path);

        if (rank->parsed()) {
            const auto variant = ce::parse_variant(opt.variant);
            if (!variant) throw ce::ScenarioError("rank: unknown variant '" + opt.variant + "'");
            return emit(ce::cmd_rank(scenario, *variant, opt.k, opt.oracle), opt);
        }
        if (auction->parsed()) {
            const auto mechanism = ce::parse_mechanism(opt.mechanism);
            if (!mechanism)
                throw ce::ScenarioError("auction: unknown mechanism '" + opt.mechanism + "'");
            return emit(ce::cmd_auction(scenario, *mechanism), opt);
        }
        if (equilibrium->parsed())
            return emit(ce::cmd_equilibrium(scenario, opt.tolerance), opt);
        if (simulate->parsed()) return emit(ce::cmd_simulate(scenario, opt.trials, opt.seed), opt);
        if (diversity->parsed())
            return emit(ce::cmd_diversity(scenario, *ce::parse_solver(opt.solver)), opt);
        if (compare->parsed()) {
            std::string left = opt.compare_left;
            std::string right = opt.compare_right;
            if (left.empty() && right.empty()) {
                const bool ads = scenario.kind == ce::ScenarioKind::auction
                                 || scenario.kind == ce::ScenarioKind::equilibrium;
                left = "ce";
                right = ads ? "vcg" : "prp";
            }
            if (left.empty() || right.empty())
                throw ce::ScenarioError("compare: provide both --left and --right (or neither)");
            return emit(ce::cmd_compare(scenario, left, right), opt);
        }
    } catch (const ce::ScenarioError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::length_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
