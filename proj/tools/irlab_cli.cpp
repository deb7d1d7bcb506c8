#include <CLI11.hpp>
#include <cstdio>
#include <iostream>

#include "irlab/harness.hpp"
#include "irlab/serialize.hpp"
#include "irlab/verify.hpp"

// Command-line front end.  Exit codes: 0 success, 2 configuration/usage
// error, 3 bound violation (verify), 4 I/O error, 1 internal error.  Errors
// print a one-line JSON object on stderr.

namespace {

using irlab::Json;

void print_error(const std::string& kind, const std::string& message) {
    Json err;
    err["error"] = {{"kind", kind}, {"message", message}};
    std::cerr << err.dump() << "\n";
}

int cmd_scenario_list() {
    for (const auto& id : irlab::scenario_ids()) std::cout << id << "\n";
    return 0;
}

int cmd_scenario_show(const std::string& id) {
    const irlab::Scenario sc = irlab::build_scenario(id);
    Json j;
    j["id"] = sc.id;
    j["num_states"] = sc.mdp.num_states();
    j["num_actions"] = sc.mdp.num_actions();
    j["horizon"] = sc.mdp.horizon();
    j["policy_class"] = sc.policy_class.is_masked() ? "masked" : "explicit";
    j["class_members_log"] = sc.policy_class.log_member_count(sc.mdp.horizon());
    j["num_base_rewards"] = sc.reward_class.size();
    j["has_offline_policy"] = sc.offline_policy.has_value();
    if (sc.documented_expert_value) j["documented_expert_value"] = *sc.documented_expert_value;
    if (sc.documented_realizable_value)
        j["documented_realizable_value"] = *sc.documented_realizable_value;
    j["terminal_states"] = sc.terminal_states;
    j["notes"] = sc.notes;
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_run(const std::string& config_path) {
    const Json j = Json::parse(irlab::read_text_file(config_path));
    const irlab::ExperimentConfig config = irlab::experiment_config_from_json(j);
    const irlab::ExperimentSummary summary = irlab::run_experiment(config);
    Json out;
    out["manifest"] = summary.manifest_path;
    out["config_hash"] = summary.config_hash;
    Json outcomes = Json::array();
    for (const auto& o : summary.outcomes)
        outcomes.push_back({{"seed", o.seed},
                            {"final_gap", o.final_gap},
                            {"selected_gap", o.selected_gap},
                            {"result", o.result_path}});
    out["outcomes"] = std::move(outcomes);
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_analyze_completeness(const std::string& scenario_id, const std::string& reset_text,
                             std::uint64_t budget, std::uint64_t samples, int pairs,
                             std::uint64_t seed, const std::string& out_path) {
    const irlab::Scenario sc = irlab::build_scenario(scenario_id);
    const irlab::ResetSpec spec = irlab::ResetSpec::parse(reset_text);

    std::unique_ptr<irlab::DemoDataset> expert_demos;
    std::unique_ptr<irlab::DemoDataset> offline_demos;
    if (spec.kind == "expert_demos" || spec.kind == "mixture" || spec.kind == "demo_subset")
        expert_demos = std::make_unique<irlab::DemoDataset>(
            irlab::sample_demos(sc.mdp, sc.expert, pairs, 0.0, seed, sc.terminal_states, "expert"));
    if (spec.kind == "offline_demos" || spec.kind == "mixture") {
        if (!sc.offline_policy) throw irlab::ConfigError("scenario has no offline policy");
        offline_demos = std::make_unique<irlab::DemoDataset>(irlab::sample_demos(
            sc.mdp, *sc.offline_policy, pairs, 0.0, seed ^ 0x5151ull, sc.terminal_states,
            "offline"));
    }
    const irlab::ResetDistribution rho =
        irlab::resolve_reset(spec, sc, expert_demos.get(), offline_demos.get());

    irlab::CompletenessOptions opts;
    opts.max_evaluations = budget;
    opts.sample_count = samples;
    opts.sample_seed = seed;
    const irlab::CompletenessReport report =
        irlab::reward_agnostic_completeness(sc.mdp, sc.policy_class, sc.reward_class, rho, opts);

    Json j = irlab::to_json(report);
    j["scenario"] = scenario_id;
    j["reset"] = spec.text();
    const std::string text = j.dump(2) + "\n";
    if (!out_path.empty()) irlab::write_text_file(out_path, text);
    std::cout << text;
    return 0;
}

int cmd_analyze_pistar(const std::string& scenario_id, std::uint64_t budget,
                       const std::string& out_path) {
    const irlab::Scenario sc = irlab::build_scenario(scenario_id);
    const irlab::PiStarResult res = irlab::best_realizable_policy(
        sc.mdp, sc.policy_class, sc.reward_class, sc.expert, budget);
    Json j;
    j["scenario"] = scenario_id;
    j["worst_case_gap"] = res.worst_case_gap;
    j["method"] = res.method;
    j["exact"] = res.exact;
    j["value_rstar"] = irlab::policy_value(sc.mdp, res.policy, sc.reward_class.rstar());
    j["policy"] = irlab::to_json(res.policy);
    const std::string text = j.dump(2) + "\n";
    if (!out_path.empty()) irlab::write_text_file(out_path, text);
    std::cout << text;
    return 0;
}

int cmd_verify(const std::string& scenario_id, const std::string& theorem, int iterations,
               double epsilon, int trials, int pairs, int offline_pairs, double delta,
               std::uint64_t seed) {
    const irlab::Scenario sc = irlab::build_scenario(scenario_id);
    bool all_hold = true;
    Json out;
    out["scenario"] = scenario_id;
    out["theorem"] = theorem;

    if (theorem == "4.3") {
        const irlab::OuterLoopCheck check =
            irlab::check_outer_loop_bound(sc, iterations, epsilon);
        out["mixture_gap"] = check.mixture_gap;
        out["bound"] = check.bound;
        out["epsilon_pi"] = check.eps_pi;
        out["epsilon_pi_lower_bound_only"] = check.eps_pi_lower_bound_only;
        out["holds"] = check.holds;
        all_hold = check.holds;
    } else if (theorem == "D.1") {
        const irlab::TrialCheck check = irlab::check_finite_sample_bound(
            sc, trials, pairs, offline_pairs, iterations, delta, seed);
        out["trials"] = check.trials;
        out["holds_fraction"] = check.fraction();
        out["mean_gap"] = check.mean_gap;
        out["mean_bound"] = check.mean_bound;
        out["required_fraction"] = 1.0 - delta;
        all_hold = check.fraction() >= 1.0 - delta;
        out["holds"] = all_hold;
    } else if (theorem == "B.1") {
        const irlab::TrialCheck check =
            irlab::check_tournament_realizable(sc, trials, pairs, delta, seed);
        out["trials"] = check.trials;
        out["holds_fraction"] = check.fraction();
        out["mean_gap"] = check.mean_gap;
        out["bound"] = check.mean_bound;
        all_hold = check.fraction() >= 1.0 - delta;
        out["holds"] = all_hold;
    } else if (theorem == "stile") {
        const irlab::TrialCheck check =
            irlab::check_tournament_misspecified(sc, trials, pairs, delta, seed);
        out["trials"] = check.trials;
        out["holds_fraction"] = check.fraction();
        out["mean_gap"] = check.mean_gap;
        out["bound"] = check.mean_bound;
        all_hold = check.fraction() >= 1.0 - delta;
        out["holds"] = all_hold;
    } else {
        throw irlab::ConfigError("unknown theorem id: " + theorem +
                                 " (expected 4.3, D.1, B.1, or stile)");
    }
    std::cout << out.dump(2) << "\n";
    if (!all_hold) {
        print_error("bound_violation", "checked inequality failed on " + scenario_id);
        return 3;
    }
    return 0;
}

int cmd_plot(const std::string& kind, const std::vector<std::string>& inputs,
             const std::string& out_prefix, bool iqm) {
    irlab::PlotRequest req;
    req.kind = kind;
    req.inputs = inputs;
    req.output_prefix =
        out_prefix.empty() ? irlab::default_output_dir() + "/" + kind : out_prefix;
    req.iqm = iqm;
    for (const auto& path : irlab::emit_plot_data(req)) std::cout << path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"tabular inverse-RL workbench"};
    app.require_subcommand(1);

    auto* scenario = app.add_subcommand("scenario", "list or inspect built-in scenarios");
    scenario->require_subcommand(1);
    auto* sc_list = scenario->add_subcommand("list", "print scenario ids");
    auto* sc_show = scenario->add_subcommand("show", "print one scenario summary");
    std::string show_id;
    sc_show->add_option("id", show_id, "scenario id")->required();

    auto* run = app.add_subcommand("run", "run an experiment config");
    std::string config_path;
    run->add_option("config", config_path, "experiment config JSON")->required();

    auto* analyze = app.add_subcommand("analyze", "structural quantities");
    analyze->require_subcommand(1);
    auto* completeness = analyze->add_subcommand("completeness", "policy-completeness error");
    std::string comp_id, comp_reset = "expert_demos", comp_out;
    std::uint64_t comp_budget = 1'000'000, comp_samples = 4096, comp_seed = 1;
    int comp_pairs = 200;
    completeness->add_option("scenario", comp_id, "scenario id")->required();
    completeness->add_option("--reset", comp_reset, "reset spec (default expert_demos)");
    completeness->add_option("--budget", comp_budget, "max exact evaluations");
    completeness->add_option("--samples", comp_samples, "sampled members in fallback mode");
    completeness->add_option("--pairs", comp_pairs, "demo pairs for empirical resets");
    completeness->add_option("--seed", comp_seed, "demo/sampling seed");
    completeness->add_option("--out", comp_out, "also write the report here");

    auto* pistar = analyze->add_subcommand("pistar", "optimal realizable policy");
    std::string pistar_id, pistar_out;
    std::uint64_t pistar_budget = 1'000'000;
    pistar->add_option("scenario", pistar_id, "scenario id")->required();
    pistar->add_option("--budget", pistar_budget, "enumeration budget");
    pistar->add_option("--out", pistar_out, "also write the result here");

    auto* verify = app.add_subcommand("verify", "check sample-complexity inequalities");
    verify->require_subcommand(1);
    auto* bounds = verify->add_subcommand("bounds", "run one inequality check");
    std::string bounds_id, bounds_theorem = "4.3";
    int bounds_iters = 64, bounds_trials = 50, bounds_pairs = 100, bounds_offline = 0;
    double bounds_eps = 0.0, bounds_delta = 0.1;
    std::uint64_t bounds_seed = 1;
    bounds->add_option("scenario", bounds_id, "scenario id")->required();
    bounds->add_option("--theorem", bounds_theorem, "4.3 | D.1 | B.1 | stile");
    bounds->add_option("--iterations", bounds_iters, "outer-loop iterations");
    bounds->add_option("--epsilon", bounds_eps, "PSDP slack (4.3 only)");
    bounds->add_option("--trials", bounds_trials, "fresh-demo trials");
    bounds->add_option("--pairs", bounds_pairs, "expert pairs per trial");
    bounds->add_option("--offline-pairs", bounds_offline, "offline pairs per trial (D.1)");
    bounds->add_option("--delta", bounds_delta, "failure probability");
    bounds->add_option("--seed", bounds_seed, "trial seed");

    auto* plot = app.add_subcommand("plot", "emit plot data from result files");
    std::string plot_kind, plot_out;
    std::vector<std::string> plot_inputs;
    bool plot_iqm = false;
    plot->add_option("kind", plot_kind,
                     "gap_curve | bound_decomposition | coverage_table | completeness_heatmap")
        ->required();
    plot->add_option("inputs", plot_inputs, "result JSON files")->required();
    plot->add_option("--out", plot_out, "output path prefix");
    plot->add_flag("--iqm", plot_iqm, "add an inter-quartile-mean column");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        print_error("usage", e.what());
        return 2;
    }

    try {
        if (sc_list->parsed()) return cmd_scenario_list();
        if (sc_show->parsed()) return cmd_scenario_show(show_id);
        if (run->parsed()) return cmd_run(config_path);
        if (completeness->parsed())
            return cmd_analyze_completeness(comp_id, comp_reset, comp_budget, comp_samples,
                                            comp_pairs, comp_seed, comp_out);
        if (pistar->parsed()) return cmd_analyze_pistar(pistar_id, pistar_budget, pistar_out);
        if (bounds->parsed())
            return cmd_verify(bounds_id, bounds_theorem, bounds_iters, bounds_eps, bounds_trials,
                              bounds_pairs, bounds_offline, bounds_delta, bounds_seed);
        if (plot->parsed()) return cmd_plot(plot_kind, plot_inputs, plot_out, plot_iqm);
        print_error("usage", "no subcommand");
        return 2;
    } catch (const irlab::ConfigError& e) {
        print_error("config", e.what());
        return 2;
    } catch (const Json::exception& e) {
        print_error("io", e.what());
        return 4;
    } catch (const std::exception& e) {
        print_error("internal", e.what());
        return 1;
    }
}
