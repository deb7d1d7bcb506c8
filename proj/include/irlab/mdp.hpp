#pragma once

#include <stdexcept>
#include <string>
#include <vector>

// Finite-horizon tabular MDP representation and the exact dynamic-programming
// primitives every solver consumes: occupancy measures, values, Q/advantage
// tables, and the performance-difference functional.
//
// All probabilities are stored dense in double precision.  Normalization is
// asserted at construction (tolerance 1e-12) and violations are hard errors;
// nothing is silently renormalized, because the verification suites depend on
// the inputs being exact.

namespace irlab {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RewardTable {
    int num_states = 0;
    int num_actions = 0;
    std::vector<double> values;  // [S][A], entries in [0,1]

    RewardTable() = default;
    RewardTable(int S, int A, double fill = 0.0);

    double operator()(int s, int a) const {
        return values[static_cast<std::size_t>(s) * num_actions + a];
    }
    double& at(int s, int a) { return values[static_cast<std::size_t>(s) * num_actions + a]; }

    void validate() const;
};

struct NonstationaryPolicy {
    int horizon = 0;
    int num_states = 0;
    int num_actions = 0;
    std::vector<double> probs;  // [H][S][A]

    NonstationaryPolicy() = default;
    NonstationaryPolicy(int H, int S, int A);

    double at(int h, int s, int a) const {
        return probs[(static_cast<std::size_t>(h) * num_states + s) * num_actions + a];
    }
    double& at(int h, int s, int a) {
        return probs[(static_cast<std::size_t>(h) * num_states + s) * num_actions + a];
    }
    const double* row(int h, int s) const {
        return probs.data() + (static_cast<std::size_t>(h) * num_states + s) * num_actions;
    }
    double* row(int h, int s) {
        return probs.data() + (static_cast<std::size_t>(h) * num_states + s) * num_actions;
    }

    static NonstationaryPolicy uniform(int H, int S, int A);
    // actions[h*S + s] gives the action played deterministically at (h, s).
    static NonstationaryPolicy deterministic(int H, int S, int A, const std::vector<int>& actions);

    int argmax_action(int h, int s) const;

    void validate() const;
};

class TabularMdp {
public:
    // transitions: [H][S][A][S'], each (h,s,a) row a distribution over S'.
    TabularMdp(int num_states, int num_actions, int horizon, std::vector<double> transitions,
               RewardTable true_reward, std::vector<double> start_dist);

    // Replicates one S*A*S kernel across all H steps.
    static TabularMdp time_homogeneous(int num_states, int num_actions, int horizon,
                                       const std::vector<double>& kernel, RewardTable true_reward,
                                       std::vector<double> start_dist);

    int num_states() const { return num_states_; }
    int num_actions() const { return num_actions_; }
    int horizon() const { return horizon_; }

    const double* transition_row(int h, int s, int a) const {
        return transitions_.data() +
               ((static_cast<std::size_t>(h) * num_states_ + s) * num_actions_ + a) * num_states_;
    }
    const std::vector<double>& transitions() const { return transitions_; }
    const RewardTable& true_reward() const { return true_reward_; }
    const std::vector<double>& start_dist() const { return start_dist_; }

private:
    int num_states_;
    int num_actions_;
    int horizon_;
    std::vector<double> transitions_;
    RewardTable true_reward_;
    std::vector<double> start_dist_;
};

struct OccupancyTensor {
    int horizon = 0;
    int num_states = 0;
    int num_actions = 0;
    std::vector<double> per_step;  // [H][S][A], each step sums to 1
    std::vector<double> averaged;  // [S][A] = mean over steps

    double step_at(int h, int s, int a) const {
        return per_step[(static_cast<std::size_t>(h) * num_states + s) * num_actions + a];
    }
    double avg_at(int s, int a) const {
        return averaged[static_cast<std::size_t>(s) * num_actions + a];
    }
    const double* step_row(int h, int s) const {
        return per_step.data() + (static_cast<std::size_t>(h) * num_states + s) * num_actions;
    }
    // Per-step state marginal d_h(s).
    double state_marginal(int h, int s) const;

    void validate() const;
};

struct QVAdvantage {
    int horizon = 0;
    int num_states = 0;
    int num_actions = 0;
    std::vector<double> q;    // [H][S][A]
    std::vector<double> v;    // [H][S]
    std::vector<double> adv;  // [H][S][A]

    double q_at(int h, int s, int a) const {
        return q[(static_cast<std::size_t>(h) * num_states + s) * num_actions + a];
    }
    double v_at(int h, int s) const { return v[static_cast<std::size_t>(h) * num_states + s]; }
    double adv_at(int h, int s, int a) const {
        return adv[(static_cast<std::size_t>(h) * num_states + s) * num_actions + a];
    }
    const double* adv_row(int h, int s) const {
        return adv.data() + (static_cast<std::size_t>(h) * num_states + s) * num_actions;
    }
    const double* q_row(int h, int s) const {
        return q.data() + (static_cast<std::size_t>(h) * num_states + s) * num_actions;
    }
};

// Exact forward DP:
//   d_1(s,a)    = mu(s) * pi_1(a|s)
//   d_{h+1}(s',a') = pi_{h+1}(a'|s') * sum_{s,a} d_h(s,a) P_h(s'|s,a)
OccupancyTensor compute_occupancy(const TabularMdp& mdp, const NonstationaryPolicy& policy);

// J(pi, r) = H * <averaged occupancy, r>.
double policy_value(const TabularMdp& mdp, const NonstationaryPolicy& policy,
                    const RewardTable& reward);

// Same quantity via backward DP; agrees with policy_value to 1e-10.
double policy_value_backward(const TabularMdp& mdp, const NonstationaryPolicy& policy,
                             const RewardTable& reward);

// Backward DP with V_{H+1} = 0:
//   Q_h(s,a) = r(s,a) + sum_{s'} P_h(s'|s,a) V_{h+1}(s')
//   V_h(s)   = sum_a pi_h(a|s) Q_h(s,a)
//   A_h      = Q_h - V_h
QVAdvantage compute_q_and_advantage(const TabularMdp& mdp, const NonstationaryPolicy& policy,
                                    const RewardTable& reward);

// sum_h E_{(s,a) ~ d^{pi_a}_h} [ A^{pi_b}_h(s,a) ]; equals
// policy_value(pi_a) - policy_value(pi_b) exactly (performance difference).
double performance_difference(const TabularMdp& mdp, const NonstationaryPolicy& policy_a,
                              const NonstationaryPolicy& policy_b, const RewardTable& reward);

namespace detail {
void check_policy_dims(const TabularMdp& mdp, const NonstationaryPolicy& policy);
void check_reward_dims(const TabularMdp& mdp, const RewardTable& reward);
}  // namespace detail

}  // namespace irlab
