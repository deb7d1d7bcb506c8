#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "irlab/classes.hpp"
#include "irlab/mdp.hpp"
#include "irlab/psdp.hpp"

// The reset-based IRL outer loop: multiplicative-weights (mirror-descent)
// reward updates against the full loss history, interleaved with PSDP
// expert-competitive responses, followed by validation-based policy
// selection.  MM, FILTER and the mixture-reset variant share this code path
// and differ only in the ResetDistribution passed in.

namespace irlab {

// Weights over the base rewards of a RewardClass; the effective reward is the
// convex combination, itself a member of the (convex) class.
struct RewardIterate {
    std::vector<double> weights;
    RewardTable effective;
};

RewardIterate uniform_reward_iterate(const RewardClass& rc);
RewardIterate make_reward_iterate(const RewardClass& rc, std::vector<double> weights);

struct DemoDataset {
    struct Record {
        int h = 0;  // 1-based timestep
        int s = 0;
        int a = 0;
    };

    int horizon = 0;
    int num_states = 0;
    int num_actions = 0;
    std::vector<Record> records;
    // records[traj_offsets[t] .. traj_offsets[t+1]) is trajectory t; the last
    // trajectory may be truncated by the requested pair count.
    std::vector<std::size_t> traj_offsets;  // size = #trajectories + 1
    // Steps before the trajectory first enters a terminal state (horizon if never).
    std::vector<int> traj_lengths;
    std::vector<std::int64_t> per_h_counts;  // size H
    std::string source;                      // "expert" | "offline" | ...

    std::size_t size() const { return records.size(); }
    std::size_t num_trajectories() const {
        return traj_offsets.empty() ? 0 : traj_offsets.size() - 1;
    }
    void validate() const;
    // Pooled empirical state-action frequencies, [S][A], summing to 1.
    std::vector<double> pooled_frequencies() const;
    // Appends other's records (same dimensions required).
    void append(const DemoDataset& other);
};

// Lhat(pi, r) = mean_{(h,s,a) in demos} r(s,a) - <averaged occupancy, r>.
double empirical_loss(const RewardTable& reward, const OccupancyTensor& policy_occupancy,
                      const DemoDataset& expert_demos);

// Infinite-expert-data form: the sample mean is replaced by the exact average
// under the expert occupancy.
double exact_loss(const RewardTable& reward, const OccupancyTensor& policy_occupancy,
                  const OccupancyTensor& expert_occupancy);

// One multiplicative-weights ascent step on the simplex:
//   w_k <- w_k * exp(eta * g_k) / Z.
RewardIterate omd_reward_step(const RewardClass& rc, const RewardIterate& state,
                              const std::vector<double>& loss_gradient, double learning_rate);

// Learning rate from the mirror-descent regret bound with payoff bound B=1:
// sqrt(2 ln K / n).
double default_learning_rate(int num_base_rewards, int iterations);

enum class LossMode {
    finite_sample,  // expert side of Lhat from demo records
    exact_expert,   // expert side of Lhat from the exact expert occupancy
};

struct GuitarConfig {
    int iterations = 1;
    LossMode mode = LossMode::finite_sample;
    ResetDistribution reset;
    double psdp_epsilon = 0.0;
    PsdpSlackRule psdp_slack = PsdpSlackRule::exact;
    double learning_rate = 0.0;  // <= 0 picks default_learning_rate
    bool adaptive_learning_rate = false;  // eta_i = sqrt(2 ln K / i) via the FTRL form
};

struct GuitarIterationRow {
    std::vector<double> reward_weights;  // weights behind r_i
    double loss = 0.0;                   // Lhat(pi_i, r_i)
    double value_rstar = 0.0;            // J(pi_i, r*)
    double gap = 0.0;                    // J(expert, r*) - J(pi_i, r*)
    double regret_avg = 0.0;             // average reward regret after i rounds
};

struct GuitarRunResult {
    std::vector<GuitarIterationRow> trace;
    std::vector<NonstationaryPolicy> policies;
    int selected_index = -1;  // validation-selected iterate
    double selected_gap = 0.0;
    double expert_value = 0.0;   // J(expert, r*)
    double mixture_value = 0.0;  // mean_i J(pi_i, r*) = value of the iterate mixture
    double mixture_gap = 0.0;    // expert_value - mixture_value
    double learning_rate = 0.0;
};

struct GuitarInputs {
    const TabularMdp* mdp = nullptr;
    const PolicyClass* policy_class = nullptr;
    const RewardClass* reward_class = nullptr;  // rstar_index required
    const NonstationaryPolicy* expert = nullptr;
    const DemoDataset* expert_demos = nullptr;      // required in finite_sample mode
    const DemoDataset* validation_demos = nullptr;  // optional; exact loss used if absent
    GuitarConfig config;
};

GuitarRunResult guitar_run(const GuitarInputs& in);

// ---- Reset-distribution constructors ----

// rho_h = mu for every h (the start-state variant).
ResetDistribution reset_from_start(const TabularMdp& mdp);
// Per-h empirical state distribution of the demo records; steps with no
// samples are a hard error.
ResetDistribution reset_from_demos(const DemoDataset& demos, const TabularMdp& mdp);
// Per-h mixture of the two empirical distributions with global weights
// N/(N+M) and M/(N+M); a side with no mass at some step cedes its weight.
ResetDistribution reset_from_mixture(const DemoDataset& expert_demos,
                                     const DemoDataset& offline_demos, const TabularMdp& mdp);
// Exact per-h state marginals of an occupancy tensor.
ResetDistribution reset_from_occupancy(const OccupancyTensor& occ);
// Empirical distribution over trajectories passing the filter.
using TrajectoryFilter = std::function<bool(int trajectory_length)>;
ResetDistribution reset_from_demo_subset(const DemoDataset& demos, const TabularMdp& mdp,
                                         const TrajectoryFilter& keep);

}  // namespace irlab
