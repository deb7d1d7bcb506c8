#include "irlab/mdp.hpp"

#include <cmath>
#include <cstddef>

#include "irlab/kernels.hpp"

namespace irlab {

namespace {

constexpr double kDistTol = 1e-12;

void check_distribution(const double* p, int n, const std::string& what) {
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        if (p[i] < 0.0) throw ConfigError(what + ": negative entry");
        total += p[i];
    }
    if (std::fabs(total - 1.0) > kDistTol)
        throw ConfigError(what + ": sums to " + std::to_string(total) + ", expected 1");
}

}  // namespace

RewardTable::RewardTable(int S, int A, double fill)
    : num_states(S), num_actions(A), values(static_cast<std::size_t>(S) * A, fill) {}

void RewardTable::validate() const {
    if (num_states <= 0 || num_actions <= 0 ||
        values.size() != static_cast<std::size_t>(num_states) * num_actions)
        throw ConfigError("reward table: inconsistent dimensions");
    for (double v : values)
        if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("reward table: entry outside [0,1]");
}

NonstationaryPolicy::NonstationaryPolicy(int H, int S, int A)
    : horizon(H),
      num_states(S),
      num_actions(A),
      probs(static_cast<std::size_t>(H) * S * A, 0.0) {}

NonstationaryPolicy NonstationaryPolicy::uniform(int H, int S, int A) {
    NonstationaryPolicy p(H, S, A);
    const double w = 1.0 / A;
    for (double& x : p.probs) x = w;
    return p;
}

NonstationaryPolicy NonstationaryPolicy::deterministic(int H, int S, int A,
                                                       const std::vector<int>& actions) {
    if (actions.size() != static_cast<std::size_t>(H) * S)
        throw ConfigError("deterministic policy: action table size mismatch");
    NonstationaryPolicy p(H, S, A);
    for (int h = 0; h < H; ++h)
        for (int s = 0; s < S; ++s) {
            const int a = actions[static_cast<std::size_t>(h) * S + s];
            if (a < 0 || a >= A) throw ConfigError("deterministic policy: action out of range");
            p.at(h, s, a) = 1.0;
        }
    return p;
}

int NonstationaryPolicy::argmax_action(int h, int s) const {
    const double* r = row(h, s);
    int best = 0;
    for (int a = 1; a < num_actions; ++a)
        if (r[a] > r[best]) best = a;
    return best;
}

void NonstationaryPolicy::validate() const {
    if (horizon <= 0 || num_states <= 0 || num_actions <= 0 ||
        probs.size() != static_cast<std::size_t>(horizon) * num_states * num_actions)
        throw ConfigError("policy: inconsistent dimensions");
    for (int h = 0; h < horizon; ++h)
        for (int s = 0; s < num_states; ++s)
            check_distribution(row(h, s), num_actions,
                               "policy row (h=" + std::to_string(h + 1) +
                                   ", s=" + std::to_string(s) + ")");
}

TabularMdp::TabularMdp(int num_states, int num_actions, int horizon,
                       std::vector<double> transitions, RewardTable true_reward,
                       std::vector<double> start_dist)
    : num_states_(num_states),
      num_actions_(num_actions),
      horizon_(horizon),
      transitions_(std::move(transitions)),
      true_reward_(std::move(true_reward)),
      start_dist_(std::move(start_dist)) {
    if (num_states_ <= 0 || num_actions_ <= 0) throw ConfigError("mdp: S and A must be positive");
    if (horizon_ <= 0) throw ConfigError("mdp: horizon must be positive");
    const std::size_t expected =
        static_cast<std::size_t>(horizon_) * num_states_ * num_actions_ * num_states_;
    if (transitions_.size() != expected) throw ConfigError("mdp: transition tensor size mismatch");
    if (start_dist_.size() != static_cast<std::size_t>(num_states_))
        throw ConfigError("mdp: start distribution size mismatch");
    if (true_reward_.num_states != num_states_ || true_reward_.num_actions != num_actions_)
        throw ConfigError("mdp: reward table dimension mismatch");
    true_reward_.validate();
    check_distribution(start_dist_.data(), num_states_, "start distribution");
    for (int h = 0; h < horizon_; ++h)
        for (int s = 0; s < num_states_; ++s)
            for (int a = 0; a < num_actions_; ++a)
                check_distribution(transition_row(h, s, a), num_states_,
                                   "transition kernel (h=" + std::to_string(h + 1) +
                                       ", s=" + std::to_string(s) + ", a=" + std::to_string(a) +
                                       ")");
}

TabularMdp TabularMdp::time_homogeneous(int num_states, int num_actions, int horizon,
                                        const std::vector<double>& kernel, RewardTable true_reward,
                                        std::vector<double> start_dist) {
    const std::size_t block = static_cast<std::size_t>(num_states) * num_actions * num_states;
    if (kernel.size() != block) throw ConfigError("mdp: kernel size mismatch");
    std::vector<double> full;
    full.reserve(block * horizon);
    for (int h = 0; h < horizon; ++h) full.insert(full.end(), kernel.begin(), kernel.end());
    return TabularMdp(num_states, num_actions, horizon, std::move(full), std::move(true_reward),
                      std::move(start_dist));
}

double OccupancyTensor::state_marginal(int h, int s) const {
    return kernels::sum(step_row(h, s), static_cast<std::size_t>(num_actions));
}

void OccupancyTensor::validate() const {
    constexpr double tol = 1e-10;
    for (int h = 0; h < horizon; ++h) {
        const double total = kernels::sum(
            per_step.data() + static_cast<std::size_t>(h) * num_states * num_actions,
            static_cast<std::size_t>(num_states) * num_actions);
        if (std::fabs(total - 1.0) > tol)
            throw ConfigError("occupancy: step " + std::to_string(h + 1) + " sums to " +
                              std::to_string(total));
    }
    const double total =
        kernels::sum(averaged.data(), static_cast<std::size_t>(num_states) * num_actions);
    if (std::fabs(total - 1.0) > tol) throw ConfigError("occupancy: averaged table not normalized");
}

namespace detail {

void check_policy_dims(const TabularMdp& mdp, const NonstationaryPolicy& policy) {
    if (policy.horizon != mdp.horizon() || policy.num_states != mdp.num_states() ||
        policy.num_actions != mdp.num_actions())
        throw ConfigError("policy dimensions do not match mdp");
}

void check_reward_dims(const TabularMdp& mdp, const RewardTable& reward) {
    if (reward.num_states != mdp.num_states() || reward.num_actions != mdp.num_actions())
        throw ConfigError("reward dimensions do not match mdp");
}

}  // namespace detail

OccupancyTensor compute_occupancy(const TabularMdp& mdp, const NonstationaryPolicy& policy) {
    detail::check_policy_dims(mdp, policy);
    const int S = mdp.num_states(), A = mdp.num_actions(), H = mdp.horizon();

    OccupancyTensor occ;
    occ.horizon = H;
    occ.num_states = S;
    occ.num_actions = A;
    occ.per_step.assign(static_cast<std::size_t>(H) * S * A, 0.0);
    occ.averaged.assign(static_cast<std::size_t>(S) * A, 0.0);

    std::vector<double> state_dist(mdp.start_dist());
    std::vector<double> next_state(static_cast<std::size_t>(S), 0.0);

    for (int h = 0; h < H; ++h) {
        double* step = occ.per_step.data() + static_cast<std::size_t>(h) * S * A;
        for (int s = 0; s < S; ++s) {
            const double ds = state_dist[s];
            const double* pi = policy.row(h, s);
            double* row = step + static_cast<std::size_t>(s) * A;
            for (int a = 0; a < A; ++a) row[a] = ds * pi[a];
        }
        if (h + 1 < H) {
            std::fill(next_state.begin(), next_state.end(), 0.0);
            for (int s = 0; s < S; ++s) {
                const double* row = step + static_cast<std::size_t>(s) * A;
                for (int a = 0; a < A; ++a) {
                    const double w = row[a];
                    if (w != 0.0)
                        kernels::axpy(next_state.data(), w, mdp.transition_row(h, s, a),
                                      static_cast<std::size_t>(S));
                }
            }
            state_dist = next_state;
        }
    }

    const double inv_h = 1.0 / H;
    for (int h = 0; h < H; ++h)
        kernels::axpy(occ.averaged.data(), inv_h,
                      occ.per_step.data() + static_cast<std::size_t>(h) * S * A,
                      static_cast<std::size_t>(S) * A);
    return occ;
}

double policy_value(const TabularMdp& mdp, const NonstationaryPolicy& policy,
                    const RewardTable& reward) {
    detail::check_reward_dims(mdp, reward);
    const OccupancyTensor occ = compute_occupancy(mdp, policy);
    return mdp.horizon() * kernels::dot(occ.averaged.data(), reward.values.data(),
                                        occ.averaged.size());
}

double policy_value_backward(const TabularMdp& mdp, const NonstationaryPolicy& policy,
                             const RewardTable& reward) {
    const QVAdvantage tables = compute_q_and_advantage(mdp, policy, reward);
    return kernels::dot(mdp.start_dist().data(), tables.v.data(),
                        static_cast<std::size_t>(mdp.num_states()));
}

QVAdvantage compute_q_and_advantage(const TabularMdp& mdp, const NonstationaryPolicy& policy,
                                    const RewardTable& reward) {
    detail::check_policy_dims(mdp, policy);
    detail::check_reward_dims(mdp, reward);
    const int S = mdp.num_states(), A = mdp.num_actions(), H = mdp.horizon();

    QVAdvantage out;
    out.horizon = H;
    out.num_states = S;
    out.num_actions = A;
    out.q.assign(static_cast<std::size_t>(H) * S * A, 0.0);
    out.v.assign(static_cast<std::size_t>(H) * S, 0.0);
    out.adv.assign(static_cast<std::size_t>(H) * S * A, 0.0);

    std::vector<double> v_next(static_cast<std::size_t>(S), 0.0);
    for (int h = H - 1; h >= 0; --h) {
        for (int s = 0; s < S; ++s) {
            double* q_row = out.q.data() + (static_cast<std::size_t>(h) * S + s) * A;
            for (int a = 0; a < A; ++a) {
                double q = reward(s, a);
                if (h + 1 < H)
                    q += kernels::dot(mdp.transition_row(h, s, a), v_next.data(),
                                      static_cast<std::size_t>(S));
                q_row[a] = q;
            }
            const double v = kernels::dot(policy.row(h, s), q_row, static_cast<std::size_t>(A));
            out.v[static_cast<std::size_t>(h) * S + s] = v;
            double* adv_row = out.adv.data() + (static_cast<std::size_t>(h) * S + s) * A;
            for (int a = 0; a < A; ++a) adv_row[a] = q_row[a] - v;
        }
        for (int s = 0; s < S; ++s) v_next[s] = out.v[static_cast<std::size_t>(h) * S + s];
    }
    return out;
}

double performance_difference(const TabularMdp& mdp, const NonstationaryPolicy& policy_a,
                              const NonstationaryPolicy& policy_b, const RewardTable& reward) {
    detail::check_policy_dims(mdp, policy_a);
    const OccupancyTensor occ_a = compute_occupancy(mdp, policy_a);
    const QVAdvantage adv_b = compute_q_and_advantage(mdp, policy_b, reward);
    double total = 0.0;
    for (int h = 0; h < mdp.horizon(); ++h)
        total += kernels::dot(
            occ_a.per_step.data() +
                static_cast<std::size_t>(h) * mdp.num_states() * mdp.num_actions(),
            adv_b.adv.data() + static_cast<std::size_t>(h) * mdp.num_states() * mdp.num_actions(),
            static_cast<std::size_t>(mdp.num_states()) * mdp.num_actions());
    return total;
}

}  // namespace irlab
