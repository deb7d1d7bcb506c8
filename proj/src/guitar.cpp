#include "irlab/guitar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "irlab/kernels.hpp"

namespace irlab {

RewardIterate uniform_reward_iterate(const RewardClass& rc) {
    rc.validate();
    const int K = rc.size();
    return make_reward_iterate(rc, std::vector<double>(static_cast<std::size_t>(K), 1.0 / K));
}

RewardIterate make_reward_iterate(const RewardClass& rc, std::vector<double> weights) {
    rc.validate();
    if (weights.size() != static_cast<std::size_t>(rc.size()))
        throw ConfigError("reward iterate: weight count mismatch");
    double total = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw ConfigError("reward iterate: negative weight");
        total += w;
    }
    if (std::fabs(total - 1.0) > 1e-12)
        throw ConfigError("reward iterate: weights sum to " + std::to_string(total));

    RewardIterate it;
    it.weights = std::move(weights);
    const auto& first = rc.base_rewards.front();
    it.effective = RewardTable(first.num_states, first.num_actions, 0.0);
    for (int k = 0; k < rc.size(); ++k)
        kernels::axpy(it.effective.values.data(), it.weights[static_cast<std::size_t>(k)],
                      rc.base_rewards[static_cast<std::size_t>(k)].values.data(),
                      it.effective.values.size());
    // Convex combinations of [0,1] tables can drift an ulp past the ends.
    for (double& v : it.effective.values) v = std::clamp(v, 0.0, 1.0);
    return it;
}

void DemoDataset::validate() const {
    if (horizon <= 0 || num_states <= 0 || num_actions <= 0)
        throw ConfigError("demo dataset: inconsistent dimensions");
    for (const auto& r : records)
        if (r.h < 1 || r.h > horizon || r.s < 0 || r.s >= num_states || r.a < 0 ||
            r.a >= num_actions)
            throw ConfigError("demo dataset: record out of range");
    if (!traj_offsets.empty()) {
        if (traj_offsets.front() != 0 || traj_offsets.back() != records.size())
            throw ConfigError("demo dataset: bad trajectory offsets");
        for (std::size_t i = 1; i < traj_offsets.size(); ++i)
            if (traj_offsets[i] < traj_offsets[i - 1])
                throw ConfigError("demo dataset: trajectory offsets not monotone");
        if (traj_lengths.size() != traj_offsets.size() - 1)
            throw ConfigError("demo dataset: trajectory length table mismatch");
    }
    if (per_h_counts.size() != static_cast<std::size_t>(horizon))
        throw ConfigError("demo dataset: per-step count table mismatch");
}

std::vector<double> DemoDataset::pooled_frequencies() const {
    if (records.empty()) throw ConfigError("demo dataset: empty");
    std::vector<double> freq(static_cast<std::size_t>(num_states) * num_actions, 0.0);
    for (const auto& r : records) freq[static_cast<std::size_t>(r.s) * num_actions + r.a] += 1.0;
    const double inv = 1.0 / static_cast<double>(records.size());
    for (double& f : freq) f *= inv;
    return freq;
}

void DemoDataset::append(const DemoDataset& other) {
    if (horizon != other.horizon || num_states != other.num_states ||
        num_actions != other.num_actions)
        throw ConfigError("demo dataset: append dimension mismatch");
    const std::size_t shift = records.size();
    records.insert(records.end(), other.records.begin(), other.records.end());
    if (traj_offsets.empty()) traj_offsets.push_back(0);
    for (std::size_t i = 1; i < other.traj_offsets.size(); ++i)
        traj_offsets.push_back(other.traj_offsets[i] + shift);
    traj_lengths.insert(traj_lengths.end(), other.traj_lengths.begin(), other.traj_lengths.end());
    if (per_h_counts.empty()) per_h_counts.assign(static_cast<std::size_t>(horizon), 0);
    for (int h = 0; h < horizon; ++h)
        per_h_counts[static_cast<std::size_t>(h)] += other.per_h_counts[static_cast<std::size_t>(h)];
    if (source != other.source) source += "+" + other.source;
}

double empirical_loss(const RewardTable& reward, const OccupancyTensor& policy_occupancy,
                      const DemoDataset& expert_demos) {
    if (expert_demos.records.empty()) throw ConfigError("empirical loss: empty expert demos");
    if (reward.num_states != policy_occupancy.num_states ||
        reward.num_actions != policy_occupancy.num_actions ||
        reward.num_states != expert_demos.num_states ||
        reward.num_actions != expert_demos.num_actions)
        throw ConfigError("empirical loss: dimension mismatch");
    double expert_term = 0.0;
    for (const auto& r : expert_demos.records) expert_term += reward(r.s, r.a);
    expert_term /= static_cast<double>(expert_demos.records.size());
    const double policy_term = kernels::dot(policy_occupancy.averaged.data(),
                                            reward.values.data(), reward.values.size());
    return expert_term - policy_term;
}

double exact_loss(const RewardTable& reward, const OccupancyTensor& policy_occupancy,
                  const OccupancyTensor& expert_occupancy) {
    if (reward.num_states != policy_occupancy.num_states ||
        reward.num_actions != policy_occupancy.num_actions ||
        expert_occupancy.num_states != policy_occupancy.num_states ||
        expert_occupancy.num_actions != policy_occupancy.num_actions)
        throw ConfigError("exact loss: dimension mismatch");
    const double expert_term = kernels::dot(expert_occupancy.averaged.data(),
                                            reward.values.data(), reward.values.size());
    const double policy_term = kernels::dot(policy_occupancy.averaged.data(),
                                            reward.values.data(), reward.values.size());
    return expert_term - policy_term;
}

RewardIterate omd_reward_step(const RewardClass& rc, const RewardIterate& state,
                              const std::vector<double>& loss_gradient, double learning_rate) {
    if (learning_rate <= 0.0) throw ConfigError("omd step: learning rate must be positive");
    if (state.weights.size() != loss_gradient.size() ||
        state.weights.size() != static_cast<std::size_t>(rc.size()))
        throw ConfigError("omd step: gradient size mismatch");
    double max_g = -std::numeric_limits<double>::infinity();
    for (double g : loss_gradient) max_g = std::max(max_g, g);
    std::vector<double> next(state.weights.size(), 0.0);
    double total = 0.0;
    for (std::size_t k = 0; k < next.size(); ++k) {
        next[k] = state.weights[k] * std::exp(learning_rate * (loss_gradient[k] - max_g));
        total += next[k];
    }
    for (double& w : next) w /= total;
    return make_reward_iterate(rc, std::move(next));
}

double default_learning_rate(int num_base_rewards, int iterations) {
    if (num_base_rewards <= 1) return 1.0;  // weights stay a point mass regardless
    return std::sqrt(2.0 * std::log(static_cast<double>(num_base_rewards)) /
                     static_cast<double>(iterations));
}

namespace {

// Weights of the FTRL closed form exp(eta * cumulative gains), normalized.
std::vector<double> ftrl_weights(const std::vector<double>& cumulative, double eta) {
    double max_c = -std::numeric_limits<double>::infinity();
    for (double c : cumulative) max_c = std::max(max_c, c);
    std::vector<double> w(cumulative.size(), 0.0);
    double total = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
        w[k] = std::exp(eta * (cumulative[k] - max_c));
        total += w[k];
    }
    for (double& x : w) x /= total;
    return w;
}

}  // namespace

GuitarRunResult guitar_run(const GuitarInputs& in) {
    if (in.mdp == nullptr || in.policy_class == nullptr || in.reward_class == nullptr ||
        in.expert == nullptr)
        throw ConfigError("guitar: missing inputs");
    const TabularMdp& mdp = *in.mdp;
    const RewardClass& rc = *in.reward_class;
    rc.validate();
    const RewardTable& rstar = rc.rstar();
    if (in.config.iterations < 1) throw ConfigError("guitar: iterations must be >= 1");
    if (in.config.mode == LossMode::finite_sample && in.expert_demos == nullptr)
        throw ConfigError("guitar: finite-sample mode requires expert demos");

    const int K = rc.size();
    const int n = in.config.iterations;
    const double eta =
        in.config.learning_rate > 0.0 ? in.config.learning_rate : default_learning_rate(K, n);

    const OccupancyTensor expert_occ = compute_occupancy(mdp, *in.expert);
    const double expert_value =
        mdp.horizon() * kernels::dot(expert_occ.averaged.data(), rstar.values.data(),
                                     rstar.values.size());

    // Expert side of Lhat per base reward (constant across iterations).
    std::vector<double> expert_term(static_cast<std::size_t>(K), 0.0);
    for (int k = 0; k < K; ++k) {
        const RewardTable& base = rc.base_rewards[static_cast<std::size_t>(k)];
        if (in.config.mode == LossMode::exact_expert) {
            expert_term[static_cast<std::size_t>(k)] = kernels::dot(
                expert_occ.averaged.data(), base.values.data(), base.values.size());
        } else {
            double t = 0.0;
            if (in.expert_demos->records.empty())
                throw ConfigError("guitar: expert demo set is empty");
            for (const auto& r : in.expert_demos->records) t += base(r.s, r.a);
            expert_term[static_cast<std::size_t>(k)] =
                t / static_cast<double>(in.expert_demos->records.size());
        }
    }

    // Validation side of Lhat per base reward.
    std::vector<double> val_term(static_cast<std::size_t>(K), 0.0);
    for (int k = 0; k < K; ++k) {
        const RewardTable& base = rc.base_rewards[static_cast<std::size_t>(k)];
        if (in.validation_demos != nullptr && !in.validation_demos->records.empty()) {
            double t = 0.0;
            for (const auto& r : in.validation_demos->records) t += base(r.s, r.a);
            val_term[static_cast<std::size_t>(k)] =
                t / static_cast<double>(in.validation_demos->records.size());
        } else {
            val_term[static_cast<std::size_t>(k)] = kernels::dot(
                expert_occ.averaged.data(), base.values.data(), base.values.size());
        }
    }

    PsdpConfig psdp_cfg;
    psdp_cfg.epsilon = in.config.psdp_epsilon;
    psdp_cfg.slack = in.config.psdp_slack;
    psdp_cfg.reset = in.config.reset;

    GuitarRunResult result;
    result.expert_value = expert_value;
    result.learning_rate = eta;
    result.trace.reserve(static_cast<std::size_t>(n));
    result.policies.reserve(static_cast<std::size_t>(n));

    std::vector<double> cumulative_gain(static_cast<std::size_t>(K), 0.0);
    std::vector<double> policy_term(static_cast<std::size_t>(K), 0.0);
    double cumulative_played = 0.0;
    double value_rstar_sum = 0.0;
    RewardIterate iterate = uniform_reward_iterate(rc);

    for (int i = 1; i <= n; ++i) {
        if (i > 1) {
            if (in.config.adaptive_learning_rate) {
                const double eta_i = K <= 1 ? 1.0
                                            : std::sqrt(2.0 * std::log(static_cast<double>(K)) /
                                                        static_cast<double>(i));
                iterate = make_reward_iterate(rc, ftrl_weights(cumulative_gain, eta_i));
            } else {
                std::vector<double> grad(static_cast<std::size_t>(K), 0.0);
                for (int k = 0; k < K; ++k)
                    grad[static_cast<std::size_t>(k)] =
                        expert_term[static_cast<std::size_t>(k)] -
                        policy_term[static_cast<std::size_t>(k)];
                iterate = omd_reward_step(rc, iterate, grad, eta);
            }
        }

        NonstationaryPolicy pi = psdp_solve(mdp, *in.policy_class, iterate.effective, psdp_cfg);
        const OccupancyTensor occ = compute_occupancy(mdp, pi);

        double loss = 0.0;
        for (int k = 0; k < K; ++k) {
            const RewardTable& base = rc.base_rewards[static_cast<std::size_t>(k)];
            policy_term[static_cast<std::size_t>(k)] =
                kernels::dot(occ.averaged.data(), base.values.data(), base.values.size());
            const double lhat_k = expert_term[static_cast<std::size_t>(k)] -
                                  policy_term[static_cast<std::size_t>(k)];
            cumulative_gain[static_cast<std::size_t>(k)] += lhat_k;
            loss += iterate.weights[static_cast<std::size_t>(k)] * lhat_k;
        }
        cumulative_played += loss;

        double best_cumulative = -std::numeric_limits<double>::infinity();
        for (double c : cumulative_gain) best_cumulative = std::max(best_cumulative, c);

        GuitarIterationRow row;
        row.reward_weights = iterate.weights;
        row.loss = loss;
        row.value_rstar =
            mdp.horizon() * policy_term[static_cast<std::size_t>(rc.rstar_index)];
        row.gap = expert_value - row.value_rstar;
        row.regret_avg = (best_cumulative - cumulative_played) / static_cast<double>(i);
        value_rstar_sum += row.value_rstar;

        result.trace.push_back(std::move(row));
        result.policies.push_back(std::move(pi));
    }

    // Validation-based selection: lowest worst-case held-out loss.
    int best_i = 0;
    double best_err = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        const OccupancyTensor occ = compute_occupancy(mdp, result.policies[static_cast<std::size_t>(i)]);
        double err = -std::numeric_limits<double>::infinity();
        for (int k = 0; k < K; ++k) {
            const RewardTable& base = rc.base_rewards[static_cast<std::size_t>(k)];
            const double pol =
                kernels::dot(occ.averaged.data(), base.values.data(), base.values.size());
            err = std::max(err, val_term[static_cast<std::size_t>(k)] - pol);
        }
        if (err < best_err) {
            best_err = err;
            best_i = i;
        }
    }
    result.selected_index = best_i;
    result.selected_gap = result.trace[static_cast<std::size_t>(best_i)].gap;
    result.mixture_value = value_rstar_sum / static_cast<double>(n);
    result.mixture_gap = expert_value - result.mixture_value;
    return result;
}

ResetDistribution reset_from_start(const TabularMdp& mdp) {
    ResetDistribution rho;
    rho.horizon = mdp.horizon();
    rho.num_states = mdp.num_states();
    rho.per_step.resize(static_cast<std::size_t>(rho.horizon) * rho.num_states);
    for (int h = 0; h < rho.horizon; ++h)
        std::copy(mdp.start_dist().begin(), mdp.start_dist().end(),
                  rho.per_step.begin() + static_cast<std::size_t>(h) * rho.num_states);
    return rho;
}

namespace {

// Per-h state counts; rows normalized.  Steps without mass throw.
ResetDistribution normalize_counts(std::vector<double> counts, int H, int S,
                                   const std::string& what) {
    ResetDistribution rho;
    rho.horizon = H;
    rho.num_states = S;
    rho.per_step = std::move(counts);
    for (int h = 0; h < H; ++h) {
        double total = 0.0;
        for (int s = 0; s < S; ++s) total += rho.at(h, s);
        if (total <= 0.0)
            throw ConfigError(what + ": no states at step " + std::to_string(h + 1));
        for (int s = 0; s < S; ++s) rho.at(h, s) /= total;
    }
    return rho;
}

std::vector<double> demo_state_counts(const DemoDataset& demos, int H, int S) {
    std::vector<double> counts(static_cast<std::size_t>(H) * S, 0.0);
    for (const auto& r : demos.records)
        counts[static_cast<std::size_t>(r.h - 1) * S + r.s] += 1.0;
    return counts;
}

}  // namespace

ResetDistribution reset_from_demos(const DemoDataset& demos, const TabularMdp& mdp) {
    demos.validate();
    if (demos.horizon != mdp.horizon() || demos.num_states != mdp.num_states())
        throw ConfigError("reset from demos: dimension mismatch");
    return normalize_counts(demo_state_counts(demos, mdp.horizon(), mdp.num_states()),
                            mdp.horizon(), mdp.num_states(), "reset from demos");
}

ResetDistribution reset_from_mixture(const DemoDataset& expert_demos,
                                     const DemoDataset& offline_demos, const TabularMdp& mdp) {
    expert_demos.validate();
    offline_demos.validate();
    const int H = mdp.horizon(), S = mdp.num_states();
    if (expert_demos.horizon != H || expert_demos.num_states != S ||
        offline_demos.horizon != H || offline_demos.num_states != S)
        throw ConfigError("reset from mixture: dimension mismatch");

    const double n_expert = static_cast<double>(expert_demos.records.size());
    const double n_offline = static_cast<double>(offline_demos.records.size());
    const auto expert_counts = demo_state_counts(expert_demos, H, S);
    const auto offline_counts = demo_state_counts(offline_demos, H, S);

    ResetDistribution rho;
    rho.horizon = H;
    rho.num_states = S;
    rho.per_step.assign(static_cast<std::size_t>(H) * S, 0.0);
    for (int h = 0; h < H; ++h) {
        double expert_h = 0.0, offline_h = 0.0;
        for (int s = 0; s < S; ++s) {
            expert_h += expert_counts[static_cast<std::size_t>(h) * S + s];
            offline_h += offline_counts[static_cast<std::size_t>(h) * S + s];
        }
        // Global N/(N+M), M/(N+M) weighting; a side with no samples at this
        // step cedes its weight to the other.
        const double w_expert = expert_h > 0.0 ? n_expert : 0.0;
        const double w_offline = offline_h > 0.0 ? n_offline : 0.0;
        if (w_expert + w_offline <= 0.0)
            throw ConfigError("reset from mixture: no states at step " + std::to_string(h + 1));
        for (int s = 0; s < S; ++s) {
            double p = 0.0;
            if (w_expert > 0.0)
                p += w_expert / (w_expert + w_offline) *
                     expert_counts[static_cast<std::size_t>(h) * S + s] / expert_h;
            if (w_offline > 0.0)
                p += w_offline / (w_expert + w_offline) *
                     offline_counts[static_cast<std::size_t>(h) * S + s] / offline_h;
            rho.at(h, s) = p;
        }
    }
    return rho;
}

ResetDistribution reset_from_occupancy(const OccupancyTensor& occ) {
    ResetDistribution rho;
    rho.horizon = occ.horizon;
    rho.num_states = occ.num_states;
    rho.per_step.assign(static_cast<std::size_t>(occ.horizon) * occ.num_states, 0.0);
    for (int h = 0; h < occ.horizon; ++h)
        for (int s = 0; s < occ.num_states; ++s) rho.at(h, s) = occ.state_marginal(h, s);
    return rho;
}

ResetDistribution reset_from_demo_subset(const DemoDataset& demos, const TabularMdp& mdp,
                                         const TrajectoryFilter& keep) {
    demos.validate();
    if (demos.horizon != mdp.horizon() || demos.num_states != mdp.num_states())
        throw ConfigError("reset from demo subset: dimension mismatch");
    if (demos.traj_offsets.empty())
        throw ConfigError("reset from demo subset: dataset has no trajectory structure");

    const int H = mdp.horizon(), S = mdp.num_states();
    std::vector<double> counts(static_cast<std::size_t>(H) * S, 0.0);
    std::size_t kept = 0;
    for (std::size_t t = 0; t + 1 < demos.traj_offsets.size(); ++t) {
        if (!keep(demos.traj_lengths[t])) continue;
        ++kept;
        for (std::size_t i = demos.traj_offsets[t]; i < demos.traj_offsets[t + 1]; ++i) {
            const auto& r = demos.records[i];
            counts[static_cast<std::size_t>(r.h - 1) * S + r.s] += 1.0;
        }
    }
    if (kept == 0) throw ConfigError("reset from demo subset: filter kept no trajectories");
    return normalize_counts(std::move(counts), H, S, "reset from demo subset");
}

}  // namespace irlab
