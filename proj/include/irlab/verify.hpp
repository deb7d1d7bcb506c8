#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "irlab/scenarios.hpp"

// Desk-scale checks of the sample-complexity inequalities.  The bound
// formulas live here so tests and the CLI evaluate identical expressions.

namespace irlab {

// H*eps_pi + H^2*eps + H*sqrt(ln K / n)
double outer_loop_bound(int horizon, double eps_pi, double psdp_epsilon, int num_base_rewards,
                        int iterations);

// Finite-sample bound:
//   H*min{ eps_mix*(1+sqrt(C_PiR/N)), C_B*eps_mix*(1+sqrt(C_PiR/(N+M))) }
//   + H*sqrt(C_R/N) + H*sqrt(ln K / n)
// with C_PiR = ln(|Pi|*K/delta) and C_R = ln(K/delta).  C_B may be +inf.
double finite_sample_bound(int horizon, double eps_pi_mix, double coverage_cb,
                           double log_policy_count, int num_base_rewards, int num_expert_pairs,
                           int num_offline_pairs, int iterations, double delta);

// 4H*sqrt((2 ln|Pi| + ln(1/delta)) / N)
double tournament_realizable_bound(int horizon, std::size_t list_size, double delta, int n_pairs);

// 3H*min_l1 + 4H*sqrt(ln(|F|/delta) / N)
double tournament_misspecified_bound(int horizon, double min_l1, std::size_t num_witnesses,
                                     double delta, int n_pairs);

struct OuterLoopCheck {
    int iterations = 0;
    double psdp_epsilon = 0.0;
    double mixture_gap = 0.0;
    double eps_pi = 0.0;
    bool eps_pi_lower_bound_only = false;
    double bound = 0.0;
    bool holds = false;
};

// Exact-expert-data run on the scenario with resets at the exact expert state
// marginals; compares the iterate-mixture gap against outer_loop_bound.
OuterLoopCheck check_outer_loop_bound(const Scenario& scenario, int iterations,
                                      double psdp_epsilon,
                                      std::uint64_t completeness_budget = 1'000'000);

struct TrialCheck {
    int trials = 0;
    int holds = 0;
    double mean_gap = 0.0;
    double mean_bound = 0.0;
    double fraction() const { return trials == 0 ? 0.0 : static_cast<double>(holds) / trials; }
};

// Fresh-demo trials of the finite-sample bound (PSDP slack 0).
TrialCheck check_finite_sample_bound(const Scenario& scenario, int trials, int num_expert_pairs,
                                     int num_offline_pairs, int iterations, double delta,
                                     std::uint64_t seed);

// Fresh-demo tournament trials; gap compared against the realizable bound
// (expert must be in the scenario's explicit list) or the misspecified bound.
TrialCheck check_tournament_realizable(const Scenario& scenario, int trials, int num_pairs,
                                       double delta, std::uint64_t seed);
TrialCheck check_tournament_misspecified(const Scenario& scenario, int trials, int num_pairs,
                                         double delta, std::uint64_t seed);

}  // namespace irlab
