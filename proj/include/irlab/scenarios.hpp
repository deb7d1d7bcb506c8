#pragma once

#include <optional>
#include <string>
#include <vector>

#include "irlab/classes.hpp"
#include "irlab/mdp.hpp"

// Built-in scenarios: misspecification constructs (blocked corridor, horizon
// truncation), tournament ladders, and seeded random masked families.  Every
// builder is deterministic.

namespace irlab {

struct Scenario {
    std::string id;
    TabularMdp mdp;
    NonstationaryPolicy expert;
    PolicyClass policy_class;
    RewardClass reward_class;  // rstar_index always set
    std::optional<NonstationaryPolicy> offline_policy;
    // Exact values the scenario is constructed to realize, when known in
    // closed form (J under the true reward).
    std::optional<double> documented_expert_value;
    std::optional<double> documented_realizable_value;
    std::vector<int> terminal_states;  // for trajectory-length filters
    std::string notes;

    Scenario(std::string id_, TabularMdp mdp_, NonstationaryPolicy expert_, PolicyClass pc,
             RewardClass rc)
        : id(std::move(id_)),
          mdp(std::move(mdp_)),
          expert(std::move(expert_)),
          policy_class(std::move(pc)),
          reward_class(std::move(rc)) {}

    void validate() const;
};

// Gridworld with a shared entry corridor that forks at a junction into a top
// corridor (blocked for the learner's class: actions entering its first cell
// are masked) and a bottom corridor.  Both forks reach an absorbing goal;
// entering from the top pays 1.0 total, from the bottom 0.9 total, spread
// uniformly over the remaining steps.  The expert walks the top fork.
//   offline_kind: "pistar"  - offline policy walks the bottom fork (covers
//                             every state the realizable optimum visits)
//                 "corridor"- offline policy stalls at the junction (leaves
//                             the bottom fork uncovered)
Scenario build_corridor_split_maze(const std::string& id, int entry_len, int branch_len,
                                   int horizon, const std::string& offline_kind = "pistar");

// The canonical blocked-corridor instance (entry 2, fork 3, horizon 12).
Scenario build_block_maze();

// U-shaped corridor with an early/late phase flip after step 10.  The class
// may act freely at early-phase states but can only stand still at late-phase
// states, truncating the learner's effective horizon to 10 moves while the
// expert (horizon 20) walks the full corridor to the far goal.  The offline
// policy is the expert truncated at the flip, so its data covers only the
// first hallway.
Scenario build_time_constraint_maze();

// Single-state two-action bandit ladder for tournament selection: policies
// play action 1 with probability p_expert + offset, offsets spanning several
// scales.  include_expert controls whether offset 0 (the expert) is a member.
Scenario build_stile_ladder(const std::string& id, int list_size, bool include_expert);

// Seeded random masked scenario: random dense MDP, random per-state action
// mask kept small enough for exact completeness enumeration, expert = the
// unmasked optimum of the true reward, offline policy = the masked optimum.
Scenario build_random_masked(const std::string& id, std::uint64_t seed, int num_states,
                             int num_actions, int horizon, std::uint64_t max_member_pairs = 500000);

// Registered scenario ids, resolvable by build_scenario.
std::vector<std::string> scenario_ids();
Scenario build_scenario(const std::string& id);

// Random-instance helpers shared by tests and verification harnesses.
TabularMdp random_mdp(std::uint64_t seed, int num_states, int num_actions, int horizon);
NonstationaryPolicy random_policy(std::uint64_t seed, int horizon, int num_states,
                                  int num_actions);
RewardTable random_reward(std::uint64_t seed, int num_states, int num_actions);

}  // namespace irlab
