#pragma once

#include "irlab/classes.hpp"
#include "irlab/mdp.hpp"

// Policy search by dynamic programming seeded by an arbitrary per-timestep
// reset distribution.  Sweeps h = H..1 and at each step picks, per reset-
// supported state, the allowed action maximizing the advantage against the
// already-built continuation.  States the reset never touches keep the
// uniform distribution over allowed actions: the solver has no certificate
// there, and leaving them unoptimized is what makes the choice of reset
// distribution observable (the certificate quantifies only over supported
// states).
//
// With slack = exact the output is locally class-optimal on the reset support
// to machine precision.  With slack = adversarial_within_epsilon the solver
// deliberately picks the worst allowed action whose action value is within
// epsilon of the per-state best, which exercises the H^2*epsilon optimization
// term of the outer-loop analysis.

namespace irlab {

enum class PsdpSlackRule {
    exact,
    adversarial_within_epsilon,
};

enum class PsdpTieBreak {
    lowest_action_index,
};

struct PsdpConfig {
    double epsilon = 0.0;  // per-step optimization tolerance, >= 0
    ResetDistribution reset;
    PsdpSlackRule slack = PsdpSlackRule::exact;
    PsdpTieBreak tie_break = PsdpTieBreak::lowest_action_index;
};

// Masked classes: per-state argmax over allowed actions at supported states.
// Explicit classes: per-step argmax over list members of the reset-weighted
// action value (ties: lowest list index).
NonstationaryPolicy psdp_solve(const TabularMdp& mdp, const PolicyClass& policy_class,
                               const RewardTable& reward, const PsdpConfig& config);

// Per-timestep certificate values
//   max_{pi' in class} E_{s~rho_h} E_{a~pi'} [ A^policy_h(s,a) ],
// where the advantage is against the given policy's own continuation.  For a
// policy produced by psdp_solve with tolerance epsilon, every entry is
// <= H*epsilon (+1e-10 slack); exact solves certify <= 1e-10.
std::vector<double> psdp_certificate(const TabularMdp& mdp, const PolicyClass& policy_class,
                                     const NonstationaryPolicy& policy, const RewardTable& reward,
                                     const ResetDistribution& reset);

}  // namespace irlab
