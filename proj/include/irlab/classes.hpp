#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "irlab/mdp.hpp"

// Learner-side structure: the policy class Pi and reward class R, the
// completeness error of a class against a reset distribution, the optimal
// realizable policy, coverage coefficients, and the behavioral-cloning
// baseline.
//
// A masked class is the set of all nonstationary policies supported on
// per-state allowed-action sets; its deterministic members are one allowed
// action per (h, s).  Maxima over the class are taken over deterministic
// members: the unrestricted-optimum term of the completeness error is
// policy-free, and the class-restricted term is linear in each per-state
// action distribution, so a deterministic member always attains it
// (docs/notes.md).  Reward maxima are taken over the base-reward corners.

namespace irlab {

struct PolicyClass {
    enum class Kind { masked, explicit_list };

    Kind kind = Kind::masked;
    int num_states = 0;
    int num_actions = 0;
    std::vector<std::uint8_t> allowed;  // [S][A], masked classes only
    std::vector<NonstationaryPolicy> members;  // explicit classes only

    static PolicyClass full(int S, int A);
    static PolicyClass masked(int S, int A, std::vector<std::uint8_t> allowed);
    static PolicyClass explicit_list(std::vector<NonstationaryPolicy> members);

    bool is_masked() const { return kind == Kind::masked; }
    bool action_allowed(int s, int a) const {
        return allowed[static_cast<std::size_t>(s) * num_actions + a] != 0;
    }
    int allowed_count(int s) const;
    // Allowed actions at s in ascending order.
    std::vector<int> allowed_actions(int s) const;
    bool fully_unmasked() const;

    // Count of deterministic nonstationary members, saturated at 2^63-1.
    // Masked: (prod_s |allow(s)|)^H; explicit: list size.
    std::uint64_t member_count(int horizon) const;
    // ln of the same count, computed without overflow (used by bounds).
    double log_member_count(int horizon) const;

    void validate() const;
};

struct RewardClass {
    std::vector<RewardTable> base_rewards;  // class = convex hull of these
    int rstar_index = -1;                   // index of the true reward, -1 if absent

    int size() const { return static_cast<int>(base_rewards.size()); }
    const RewardTable& rstar() const;
    void validate() const;
};

// Per-timestep state distribution seeding local policy search.
struct ResetDistribution {
    int horizon = 0;
    int num_states = 0;
    std::vector<double> per_step;  // [H][S]

    double at(int h, int s) const {
        return per_step[static_cast<std::size_t>(h) * num_states + s];
    }
    double& at(int h, int s) {
        return per_step[static_cast<std::size_t>(h) * num_states + s];
    }
    const double* row(int h) const {
        return per_step.data() + static_cast<std::size_t>(h) * num_states;
    }

    void validate() const;  // each row a distribution (tolerance 1e-10)
};

struct CompletenessReport {
    double epsilon_pi = 0.0;
    bool lower_bound_only = false;
    std::uint64_t evaluations = 0;       // (policy, reward) pairs evaluated
    std::uint64_t worst_policy_index = 0;  // enumeration/sample order
    int worst_reward_index = 0;
    NonstationaryPolicy worst_policy;
    // Flattened [policies][rewards] table of per-pair errors, stored only when
    // small enough to be useful (pair_rows == 0 otherwise).
    std::vector<double> per_pair_errors;
    std::uint64_t pair_rows = 0;
    int pair_cols = 0;
};

struct CompletenessOptions {
    std::uint64_t max_evaluations = 1'000'000;
    bool allow_lower_bound = true;
    std::uint64_t sample_count = 4096;       // policies sampled in fallback mode
    std::uint64_t sample_seed = 0;
    std::uint64_t pair_table_limit = 65536;  // store per-pair errors up to this many
};

// Completeness error of one (policy, reward, reset) triple:
//   max_h  E_{s~rho_h}[ max_a A^pi_h(s,a) ] - max_{pi' in class} E_{s~rho_h} E_{a~pi'} [ A^pi_h(s,a) ]
// For masked classes the second term decomposes per state into the max over
// allowed actions.  Always >= 0; exactly 0 for fully unmasked classes.
double reward_indexed_completeness(const TabularMdp& mdp, const PolicyClass& policy_class,
                                   const NonstationaryPolicy& policy, const RewardTable& reward,
                                   const ResetDistribution& rho);

// Per-h values of the same quantity (the scalar above is their maximum).
std::vector<double> reward_indexed_completeness_per_step(const TabularMdp& mdp,
                                                         const PolicyClass& policy_class,
                                                         const NonstationaryPolicy& policy,
                                                         const RewardTable& reward,
                                                         const ResetDistribution& rho);

// Worst case of reward_indexed_completeness over deterministic class members
// and base-reward corners.  Exact when the enumeration fits the budget;
// otherwise a sampled lower bound flagged lower_bound_only (or a hard error
// when options.allow_lower_bound is false).
CompletenessReport reward_agnostic_completeness(const TabularMdp& mdp,
                                                const PolicyClass& policy_class,
                                                const RewardClass& reward_class,
                                                const ResetDistribution& rho,
                                                const CompletenessOptions& options = {});

struct PiStarResult {
    NonstationaryPolicy policy;
    double worst_case_gap = 0.0;  // max_r J(expert, r) - J(policy, r) over corners
    bool exact = true;
    std::string method;  // "explicit-scan" | "enumeration" | "aligned-corners"
};

// argmin over the class of max_r [ J(expert, r) - J(pi, r) ]; the inner max
// over the convex hull is attained at a base-reward corner (the objective is
// linear in r).  Masked classes too large to enumerate are solved exactly via
// per-corner backward induction when one induced optimum attains the
// information-theoretic lower bound max_r [J(expert,r) - v_r*]; otherwise a
// ConfigError reports the member count.
PiStarResult best_realizable_policy(const TabularMdp& mdp, const PolicyClass& policy_class,
                                    const RewardClass& reward_class,
                                    const NonstationaryPolicy& expert,
                                    std::uint64_t enumeration_budget = 1'000'000);

// max over entries with numerator mass > 0 of numerator/denominator, +inf when
// any covered entry has zero denominator mass.  Averaged occupancies by
// default; per_step compares step-by-step and takes the overall max.
double coverage_coefficient(const OccupancyTensor& numerator, const OccupancyTensor& denominator,
                            bool per_step = false);

// Backward induction restricted to allowed actions (ties: lowest index).
// The returned policy maximizes J(., reward) over the masked class.
NonstationaryPolicy masked_optimal_policy(const TabularMdp& mdp, const PolicyClass& policy_class,
                                          const RewardTable& reward);

// Materializes the deterministic members of a class, in enumeration order.
// Errors when the count exceeds `limit`.
std::vector<NonstationaryPolicy> enumerate_members(const PolicyClass& policy_class, int horizon,
                                                   std::uint64_t limit);

struct DemoDataset;  // defined in guitar.hpp

// Majority-vote cloning projected onto the class mask; unvisited (h, s) get
// the uniform distribution over allowed actions.  Ties break to the lowest
// action index.
NonstationaryPolicy behavioral_cloning(const DemoDataset& demos, const PolicyClass& policy_class);

}  // namespace irlab
