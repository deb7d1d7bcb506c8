#include "irlab/psdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "irlab/kernels.hpp"

namespace irlab {

namespace {

void check_inputs(const TabularMdp& mdp, const PolicyClass& pc, const RewardTable& reward,
                  const ResetDistribution& reset) {
    detail::check_reward_dims(mdp, reward);
    reward.validate();
    if (pc.num_states != mdp.num_states() || pc.num_actions != mdp.num_actions())
        throw ConfigError("psdp: policy class dimensions do not match mdp");
    if (reset.horizon != mdp.horizon() || reset.num_states != mdp.num_states())
        throw ConfigError("psdp: reset distribution dimensions do not match mdp");
    for (int h = 0; h < reset.horizon; ++h) {
        double total = 0.0;
        for (int s = 0; s < reset.num_states; ++s) total += reset.at(h, s);
        if (total <= 0.0)
            throw ConfigError("psdp: reset distribution has no mass at step " +
                              std::to_string(h + 1));
    }
}

}  // namespace

NonstationaryPolicy psdp_solve(const TabularMdp& mdp, const PolicyClass& policy_class,
                               const RewardTable& reward, const PsdpConfig& config) {
    check_inputs(mdp, policy_class, reward, config.reset);
    if (config.epsilon < 0.0) throw ConfigError("psdp: epsilon must be >= 0");
    const int S = mdp.num_states(), A = mdp.num_actions(), H = mdp.horizon();

    NonstationaryPolicy policy(H, S, A);
    std::vector<double> v_next(static_cast<std::size_t>(S), 0.0);
    std::vector<double> v_cur(static_cast<std::size_t>(S), 0.0);
    std::vector<double> q(static_cast<std::size_t>(A), 0.0);
    std::vector<double> q_all(static_cast<std::size_t>(S) * A, 0.0);

    for (int h = H - 1; h >= 0; --h) {
        for (int s = 0; s < S; ++s) {
            double* q_row = q_all.data() + static_cast<std::size_t>(s) * A;
            for (int a = 0; a < A; ++a) {
                double val = reward(s, a);
                if (h + 1 < H)
                    val += kernels::dot(mdp.transition_row(h, s, a), v_next.data(),
                                        static_cast<std::size_t>(S));
                q_row[a] = val;
            }
        }

        if (policy_class.is_masked()) {
            for (int s = 0; s < S; ++s) {
                const double* q_row = q_all.data() + static_cast<std::size_t>(s) * A;
                double* out = policy.row(h, s);
                if (config.reset.at(h, s) > 0.0) {
                    double best = -std::numeric_limits<double>::infinity();
                    for (int a = 0; a < A; ++a)
                        if (policy_class.action_allowed(s, a)) best = std::max(best, q_row[a]);
                    int chosen = -1;
                    if (config.slack == PsdpSlackRule::adversarial_within_epsilon &&
                        config.epsilon > 0.0) {
                        // Worst allowed action still within epsilon of the best.
                        double worst = std::numeric_limits<double>::infinity();
                        for (int a = 0; a < A; ++a) {
                            if (!policy_class.action_allowed(s, a)) continue;
                            if (q_row[a] >= best - config.epsilon && q_row[a] < worst) {
                                worst = q_row[a];
                                chosen = a;
                            }
                        }
                    } else {
                        for (int a = 0; a < A; ++a) {
                            if (!policy_class.action_allowed(s, a)) continue;
                            if (chosen < 0 || q_row[a] > q_row[chosen]) chosen = a;
                        }
                    }
                    out[chosen] = 1.0;
                    v_cur[s] = q_row[chosen];
                } else {
                    // Never reset here: the solver has not trained this state.
                    const int n_allow = policy_class.allowed_count(s);
                    const double w = 1.0 / n_allow;
                    double v = 0.0;
                    for (int a = 0; a < A; ++a) {
                        if (!policy_class.action_allowed(s, a)) continue;
                        out[a] = w;
                        v += w * q_row[a];
                    }
                    v_cur[s] = v;
                }
            }
        } else {
            // Explicit class: argmax over list members of the reset-weighted
            // action value at this step.
            std::size_t best_m = 0;
            double best_score = -std::numeric_limits<double>::infinity();
            for (std::size_t m = 0; m < policy_class.members.size(); ++m) {
                double score = 0.0;
                for (int s = 0; s < S; ++s) {
                    const double p = config.reset.at(h, s);
                    if (p > 0.0)
                        score += p * kernels::dot(policy_class.members[m].row(h, s),
                                                  q_all.data() + static_cast<std::size_t>(s) * A,
                                                  static_cast<std::size_t>(A));
                }
                if (score > best_score) {
                    best_score = score;
                    best_m = m;
                }
            }
            const NonstationaryPolicy& winner = policy_class.members[best_m];
            for (int s = 0; s < S; ++s) {
                double* out = policy.row(h, s);
                const double* src = winner.row(h, s);
                std::copy(src, src + A, out);
                v_cur[s] = kernels::dot(src, q_all.data() + static_cast<std::size_t>(s) * A,
                                        static_cast<std::size_t>(A));
            }
        }
        v_next.swap(v_cur);
    }
    return policy;
}

std::vector<double> psdp_certificate(const TabularMdp& mdp, const PolicyClass& policy_class,
                                     const NonstationaryPolicy& policy, const RewardTable& reward,
                                     const ResetDistribution& reset) {
    check_inputs(mdp, policy_class, reward, reset);
    detail::check_policy_dims(mdp, policy);
    const int S = mdp.num_states(), A = mdp.num_actions(), H = mdp.horizon();
    const QVAdvantage adv = compute_q_and_advantage(mdp, policy, reward);

    std::vector<double> cert(static_cast<std::size_t>(H), 0.0);
    for (int h = 0; h < H; ++h) {
        if (policy_class.is_masked()) {
            double total = 0.0;
            for (int s = 0; s < S; ++s) {
                const double p = reset.at(h, s);
                if (p <= 0.0) continue;
                double best = -std::numeric_limits<double>::infinity();
                const double* row = adv.adv_row(h, s);
                for (int a = 0; a < A; ++a)
                    if (policy_class.action_allowed(s, a)) best = std::max(best, row[a]);
                total += p * best;
            }
            cert[static_cast<std::size_t>(h)] = total;
        } else {
            double best = -std::numeric_limits<double>::infinity();
            for (const auto& m : policy_class.members) {
                double val = 0.0;
                for (int s = 0; s < S; ++s) {
                    const double p = reset.at(h, s);
                    if (p > 0.0)
                        val += p * kernels::dot(m.row(h, s), adv.adv_row(h, s),
                                                static_cast<std::size_t>(A));
                }
                best = std::max(best, val);
            }
            cert[static_cast<std::size_t>(h)] = best;
        }
    }
    return cert;
}

}  // namespace irlab
