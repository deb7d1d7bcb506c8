#include "irlab/verify.hpp"

#include <cmath>
#include <limits>
#include <memory>

#include "irlab/guitar.hpp"
#include "irlab/harness.hpp"
#include "irlab/kernels.hpp"
#include "irlab/stile.hpp"

namespace irlab {

double outer_loop_bound(int horizon, double eps_pi, double psdp_epsilon, int num_base_rewards,
                        int iterations) {
    const double h = static_cast<double>(horizon);
    const double regret =
        num_base_rewards > 1
            ? h * std::sqrt(std::log(static_cast<double>(num_base_rewards)) / iterations)
            : 0.0;
    return h * eps_pi + h * h * psdp_epsilon + regret;
}

double finite_sample_bound(int horizon, double eps_pi_mix, double coverage_cb,
                           double log_policy_count, int num_base_rewards, int num_expert_pairs,
                           int num_offline_pairs, int iterations, double delta) {
    const double h = static_cast<double>(horizon);
    const double k = static_cast<double>(num_base_rewards);
    const double n = static_cast<double>(num_expert_pairs);
    const double c_pi_r = log_policy_count + std::log(k / delta);
    const double expert_side = eps_pi_mix * (1.0 + std::sqrt(c_pi_r / n));
    double offline_side = std::numeric_limits<double>::infinity();
    if (std::isfinite(coverage_cb) && num_offline_pairs > 0)
        offline_side = coverage_cb * eps_pi_mix *
                       (1.0 + std::sqrt(c_pi_r / (n + num_offline_pairs)));
    const double misspec = h * std::min(expert_side, offline_side);
    const double statistical = h * std::sqrt(std::log(k / delta) / n);
    const double regret = k > 1 ? h * std::sqrt(std::log(k) / iterations) : 0.0;
    return misspec + statistical + regret;
}

double tournament_realizable_bound(int horizon, std::size_t list_size, double delta, int n_pairs) {
    return 4.0 * horizon *
           std::sqrt((2.0 * std::log(static_cast<double>(list_size)) + std::log(1.0 / delta)) /
                     n_pairs);
}

double tournament_misspecified_bound(int horizon, double min_l1, std::size_t num_witnesses,
                                     double delta, int n_pairs) {
    return 3.0 * horizon * min_l1 +
           4.0 * horizon *
               std::sqrt(std::log(static_cast<double>(num_witnesses) / delta) / n_pairs);
}

OuterLoopCheck check_outer_loop_bound(const Scenario& scenario, int iterations,
                                      double psdp_epsilon, std::uint64_t completeness_budget) {
    const ResetDistribution reset =
        reset_from_occupancy(compute_occupancy(scenario.mdp, scenario.expert));

    GuitarInputs inputs;
    inputs.mdp = &scenario.mdp;
    inputs.policy_class = &scenario.policy_class;
    inputs.reward_class = &scenario.reward_class;
    inputs.expert = &scenario.expert;
    inputs.config.iterations = iterations;
    inputs.config.mode = LossMode::exact_expert;
    inputs.config.reset = reset;
    inputs.config.psdp_epsilon = psdp_epsilon;
    inputs.config.psdp_slack =
        psdp_epsilon > 0.0 ? PsdpSlackRule::adversarial_within_epsilon : PsdpSlackRule::exact;
    const GuitarRunResult run = guitar_run(inputs);

    CompletenessOptions opts;
    opts.max_evaluations = completeness_budget;
    opts.sample_count = 2048;
    const CompletenessReport completeness = reward_agnostic_completeness(
        scenario.mdp, scenario.policy_class, scenario.reward_class, reset, opts);

    OuterLoopCheck check;
    check.iterations = iterations;
    check.psdp_epsilon = psdp_epsilon;
    check.mixture_gap = run.mixture_gap;
    check.eps_pi = completeness.epsilon_pi;
    check.eps_pi_lower_bound_only = completeness.lower_bound_only;
    check.bound = outer_loop_bound(scenario.mdp.horizon(), completeness.epsilon_pi, psdp_epsilon,
                                   scenario.reward_class.size(), iterations);
    check.holds = check.mixture_gap <= check.bound + 1e-9;
    return check;
}

TrialCheck check_finite_sample_bound(const Scenario& scenario, int trials, int num_expert_pairs,
                                     int num_offline_pairs, int iterations, double delta,
                                     std::uint64_t seed) {
    const TabularMdp& mdp = scenario.mdp;
    const double log_pi = scenario.policy_class.log_member_count(mdp.horizon());
    const OccupancyTensor expert_occ = compute_occupancy(mdp, scenario.expert);
    double coverage_cb = std::numeric_limits<double>::infinity();
    if (scenario.offline_policy)
        coverage_cb = coverage_coefficient(
            expert_occ, compute_occupancy(mdp, *scenario.offline_policy));

    TrialCheck stats;
    stats.trials = trials;
    for (int t = 0; t < trials; ++t) {
        const std::uint64_t trial_seed = seed + 7919ull * static_cast<std::uint64_t>(t);
        DemoDataset expert_demos = sample_demos(mdp, scenario.expert, num_expert_pairs, 0.0,
                                                trial_seed, scenario.terminal_states, "expert");
        ResetDistribution reset;
        std::unique_ptr<DemoDataset> offline_demos;
        if (num_offline_pairs > 0 && scenario.offline_policy) {
            offline_demos = std::make_unique<DemoDataset>(
                sample_demos(mdp, *scenario.offline_policy, num_offline_pairs, 0.0,
                             trial_seed ^ 0xABCDEF12ull, scenario.terminal_states, "offline"));
            reset = reset_from_mixture(expert_demos, *offline_demos, mdp);
        } else {
            reset = reset_from_demos(expert_demos, mdp);
        }

        GuitarInputs inputs;
        inputs.mdp = &mdp;
        inputs.policy_class = &scenario.policy_class;
        inputs.reward_class = &scenario.reward_class;
        inputs.expert = &scenario.expert;
        inputs.expert_demos = &expert_demos;
        inputs.config.iterations = iterations;
        inputs.config.mode = LossMode::finite_sample;
        inputs.config.reset = reset;
        const GuitarRunResult run = guitar_run(inputs);

        // Exact completeness of the class against this trial's empirical reset.
        CompletenessOptions opts;
        opts.allow_lower_bound = false;
        const CompletenessReport completeness = reward_agnostic_completeness(
            mdp, scenario.policy_class, scenario.reward_class, reset, opts);

        const double bound = finite_sample_bound(
            mdp.horizon(), completeness.epsilon_pi, coverage_cb, log_pi,
            scenario.reward_class.size(), num_expert_pairs, num_offline_pairs, iterations, delta);
        stats.mean_gap += run.mixture_gap;
        stats.mean_bound += bound;
        if (run.mixture_gap <= bound + 1e-9) ++stats.holds;
    }
    stats.mean_gap /= trials;
    stats.mean_bound /= trials;
    return stats;
}

namespace {

TrialCheck tournament_trials(const Scenario& scenario, int trials, int num_pairs, double delta,
                             std::uint64_t seed, bool realizable) {
    if (scenario.policy_class.is_masked())
        throw ConfigError("tournament check: scenario needs an explicit policy list");
    const TabularMdp& mdp = scenario.mdp;
    const auto& list = scenario.policy_class.members;
    const RewardTable& rstar = scenario.reward_class.rstar();
    const double expert_value = policy_value(mdp, scenario.expert, rstar);

    double bound = 0.0;
    if (realizable) {
        bound = tournament_realizable_bound(mdp.horizon(), list.size(), delta, num_pairs);
    } else {
        const OccupancyTensor expert_occ = compute_occupancy(mdp, scenario.expert);
        double min_l1 = std::numeric_limits<double>::infinity();
        for (const auto& pi : list) {
            const OccupancyTensor occ = compute_occupancy(mdp, pi);
            min_l1 = std::min(min_l1, kernels::l1_distance(occ.averaged.data(),
                                                           expert_occ.averaged.data(),
                                                           occ.averaged.size()));
        }
        bound = tournament_misspecified_bound(mdp.horizon(), min_l1, list.size() * (list.size() - 1),
                                              delta, num_pairs);
    }

    std::vector<double> values;
    values.reserve(list.size());
    for (const auto& pi : list) values.push_back(policy_value(mdp, pi, rstar));

    TrialCheck stats;
    stats.trials = trials;
    stats.mean_bound = bound;
    for (int t = 0; t < trials; ++t) {
        const std::uint64_t trial_seed = seed + 104729ull * static_cast<std::uint64_t>(t);
        const DemoDataset demos = sample_demos(mdp, scenario.expert, num_pairs, 0.0, trial_seed,
                                               scenario.terminal_states, "expert");
        const StileResult sel = stile_select(mdp, list, demos);
        const double gap = expert_value - values[static_cast<std::size_t>(sel.selected_index)];
        stats.mean_gap += gap;
        if (gap <= bound + 1e-9) ++stats.holds;
    }
    stats.mean_gap /= trials;
    return stats;
}

}  // namespace

TrialCheck check_tournament_realizable(const Scenario& scenario, int trials, int num_pairs,
                                       double delta, std::uint64_t seed) {
    return tournament_trials(scenario, trials, num_pairs, delta, seed, true);
}

TrialCheck check_tournament_misspecified(const Scenario& scenario, int trials, int num_pairs,
                                         double delta, std::uint64_t seed) {
    return tournament_trials(scenario, trials, num_pairs, delta, seed, false);
}

}  // namespace irlab
