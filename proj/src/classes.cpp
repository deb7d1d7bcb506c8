#include "irlab/classes.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <thread>

#include "irlab/guitar.hpp"
#include "irlab/kernels.hpp"
#include "irlab/rng.hpp"

namespace irlab {

namespace {

constexpr std::uint64_t kCountSaturated = std::numeric_limits<std::uint64_t>::max();

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
    if (a == 0 || b == 0) return 0;
    if (a > kCountSaturated / b) return kCountSaturated;
    return a * b;
}

}  // namespace

PolicyClass PolicyClass::full(int S, int A) {
    PolicyClass pc;
    pc.kind = Kind::masked;
    pc.num_states = S;
    pc.num_actions = A;
    pc.allowed.assign(static_cast<std::size_t>(S) * A, 1);
    return pc;
}

PolicyClass PolicyClass::masked(int S, int A, std::vector<std::uint8_t> allowed) {
    PolicyClass pc;
    pc.kind = Kind::masked;
    pc.num_states = S;
    pc.num_actions = A;
    pc.allowed = std::move(allowed);
    pc.validate();
    return pc;
}

PolicyClass PolicyClass::explicit_list(std::vector<NonstationaryPolicy> members) {
    PolicyClass pc;
    pc.kind = Kind::explicit_list;
    pc.members = std::move(members);
    if (pc.members.empty()) throw ConfigError("explicit policy class: empty list");
    pc.num_states = pc.members.front().num_states;
    pc.num_actions = pc.members.front().num_actions;
    pc.validate();
    return pc;
}

int PolicyClass::allowed_count(int s) const {
    int n = 0;
    for (int a = 0; a < num_actions; ++a) n += action_allowed(s, a) ? 1 : 0;
    return n;
}

std::vector<int> PolicyClass::allowed_actions(int s) const {
    std::vector<int> acts;
    for (int a = 0; a < num_actions; ++a)
        if (action_allowed(s, a)) acts.push_back(a);
    return acts;
}

bool PolicyClass::fully_unmasked() const {
    if (kind != Kind::masked) return false;
    for (std::uint8_t b : allowed)
        if (b == 0) return false;
    return true;
}

std::uint64_t PolicyClass::member_count(int horizon) const {
    if (kind == Kind::explicit_list) return members.size();
    std::uint64_t per_step = 1;
    for (int s = 0; s < num_states; ++s)
        per_step = saturating_mul(per_step, static_cast<std::uint64_t>(allowed_count(s)));
    std::uint64_t total = 1;
    for (int h = 0; h < horizon; ++h) total = saturating_mul(total, per_step);
    return total;
}

double PolicyClass::log_member_count(int horizon) const {
    if (kind == Kind::explicit_list) return std::log(static_cast<double>(members.size()));
    double per_step = 0.0;
    for (int s = 0; s < num_states; ++s) per_step += std::log(static_cast<double>(allowed_count(s)));
    return horizon * per_step;
}

void PolicyClass::validate() const {
    if (kind == Kind::masked) {
        if (num_states <= 0 || num_actions <= 0 ||
            allowed.size() != static_cast<std::size_t>(num_states) * num_actions)
            throw ConfigError("masked policy class: inconsistent dimensions");
        for (int s = 0; s < num_states; ++s)
            if (allowed_count(s) == 0)
                throw ConfigError("masked policy class: state " + std::to_string(s) +
                                  " has no allowed action");
    } else {
        if (members.empty()) throw ConfigError("explicit policy class: empty list");
        for (const auto& m : members) {
            m.validate();
            if (m.num_states != num_states || m.num_actions != num_actions)
                throw ConfigError("explicit policy class: member dimension mismatch");
        }
    }
}

const RewardTable& RewardClass::rstar() const {
    if (rstar_index < 0 || rstar_index >= size())
        throw ConfigError("reward class: true reward not identified");
    return base_rewards[static_cast<std::size_t>(rstar_index)];
}

void RewardClass::validate() const {
    if (base_rewards.empty()) throw ConfigError("reward class: empty base list");
    for (const auto& r : base_rewards) {
        r.validate();
        if (r.num_states != base_rewards.front().num_states ||
            r.num_actions != base_rewards.front().num_actions)
            throw ConfigError("reward class: base reward dimension mismatch");
    }
    if (rstar_index >= size()) throw ConfigError("reward class: rstar index out of range");
}

void ResetDistribution::validate() const {
    if (horizon <= 0 || num_states <= 0 ||
        per_step.size() != static_cast<std::size_t>(horizon) * num_states)
        throw ConfigError("reset distribution: inconsistent dimensions");
    for (int h = 0; h < horizon; ++h) {
        double total = 0.0;
        for (int s = 0; s < num_states; ++s) {
            const double p = at(h, s);
            if (p < 0.0) throw ConfigError("reset distribution: negative entry");
            total += p;
        }
        if (std::fabs(total - 1.0) > 1e-10)
            throw ConfigError("reset distribution: step " + std::to_string(h + 1) + " sums to " +
                              std::to_string(total));
    }
}

namespace {

void check_class_dims(const TabularMdp& mdp, const PolicyClass& pc) {
    if (pc.num_states != mdp.num_states() || pc.num_actions != mdp.num_actions())
        throw ConfigError("policy class dimensions do not match mdp");
}

void check_reset_dims(const TabularMdp& mdp, const ResetDistribution& rho) {
    if (rho.horizon != mdp.horizon() || rho.num_states != mdp.num_states())
        throw ConfigError("reset distribution dimensions do not match mdp");
}

double max_over_all(const double* row, int n) {
    double best = row[0];
    for (int i = 1; i < n; ++i) best = std::max(best, row[i]);
    return best;
}

double max_over_allowed(const double* row, const PolicyClass& pc, int s) {
    double best = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < pc.num_actions; ++a)
        if (pc.action_allowed(s, a)) best = std::max(best, row[a]);
    return best;
}

// Per-(h,s) action choices of a deterministic masked member, as indices into
// the per-state allowed-action lists.
struct MaskedEnumeration {
    int horizon;
    int num_states;
    std::vector<std::vector<int>> acts;  // allowed actions per state
    std::vector<int> radix;              // per position (h*S + s)

    explicit MaskedEnumeration(const PolicyClass& pc, int H)
        : horizon(H), num_states(pc.num_states) {
        acts.reserve(static_cast<std::size_t>(num_states));
        for (int s = 0; s < num_states; ++s) acts.push_back(pc.allowed_actions(s));
        radix.resize(static_cast<std::size_t>(H) * num_states);
        for (int h = 0; h < H; ++h)
            for (int s = 0; s < num_states; ++s)
                radix[static_cast<std::size_t>(h) * num_states + s] =
                    static_cast<int>(acts[static_cast<std::size_t>(s)].size());
    }

    // Digits of `index` in mixed radix; the last position is least significant.
    void decode(std::uint64_t index, std::vector<int>& digits) const {
        digits.assign(radix.size(), 0);
        for (std::size_t p = radix.size(); p-- > 0;) {
            const auto r = static_cast<std::uint64_t>(radix[p]);
            digits[p] = static_cast<int>(index % r);
            index /= r;
        }
    }

    bool advance(std::vector<int>& digits) const {
        for (std::size_t p = digits.size(); p-- > 0;) {
            if (++digits[p] < radix[p]) return true;
            digits[p] = 0;
        }
        return false;
    }

    int action_at(const std::vector<int>& digits, int h, int s) const {
        return acts[static_cast<std::size_t>(s)]
                   [static_cast<std::size_t>(digits[static_cast<std::size_t>(h) * num_states + s])];
    }

    NonstationaryPolicy materialize(const std::vector<int>& digits, int A) const {
        std::vector<int> actions(static_cast<std::size_t>(horizon) * num_states);
        for (int h = 0; h < horizon; ++h)
            for (int s = 0; s < num_states; ++s)
                actions[static_cast<std::size_t>(h) * num_states + s] = action_at(digits, h, s);
        return NonstationaryPolicy::deterministic(horizon, num_states, A, actions);
    }
};

// Backward sweep for one deterministic member under one reward.  Returns the
// member's completeness error against rho (max over h of the reset-weighted
// gap between unrestricted and allowed action values); value_out, when given,
// receives J(member, reward).
double det_member_error(const TabularMdp& mdp, const PolicyClass& pc,
                        const MaskedEnumeration& enumr, const std::vector<int>& digits,
                        const RewardTable& reward, const ResetDistribution* rho,
                        double* value_out, std::vector<double>& v_next,
                        std::vector<double>& v_cur, std::vector<double>& q_buf) {
    const int S = mdp.num_states(), A = mdp.num_actions(), H = mdp.horizon();
    v_next.assign(static_cast<std::size_t>(S), 0.0);
    double err = 0.0;
    for (int h = H - 1; h >= 0; --h) {
        v_cur.assign(static_cast<std::size_t>(S), 0.0);
        double gap_h = 0.0;
        for (int s = 0; s < S; ++s) {
            double* q = q_buf.data();
            for (int a = 0; a < A; ++a) {
                double val = reward(s, a);
                if (h + 1 < H)
                    val += kernels::dot(mdp.transition_row(h, s, a), v_next.data(),
                                        static_cast<std::size_t>(S));
                q[a] = val;
            }
            if (rho != nullptr) {
                const double p = rho->at(h, s);
                if (p > 0.0) gap_h += p * (max_over_all(q, A) - max_over_allowed(q, pc, s));
            }
            v_cur[s] = q[enumr.action_at(digits, h, s)];
        }
        err = std::max(err, gap_h);
        v_next.swap(v_cur);
    }
    if (value_out != nullptr)
        *value_out =
            kernels::dot(mdp.start_dist().data(), v_next.data(), static_cast<std::size_t>(S));
    return err;
}

struct ChunkBest {
    double err = -std::numeric_limits<double>::infinity();
    std::uint64_t policy_index = 0;
    int reward_index = 0;
    std::vector<int> digits;
};

unsigned worker_count(std::uint64_t items) {
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const auto capped = static_cast<unsigned>(std::min<std::uint64_t>(items, hw));
    return std::max(1u, capped);
}

}  // namespace

std::vector<double> reward_indexed_completeness_per_step(const TabularMdp& mdp,
                                                         const PolicyClass& policy_class,
                                                         const NonstationaryPolicy& policy,
                                                         const RewardTable& reward,
                                                         const ResetDistribution& rho) {
    detail::check_policy_dims(mdp, policy);
    detail::check_reward_dims(mdp, reward);
    check_class_dims(mdp, policy_class);
    check_reset_dims(mdp, rho);

    const int S = mdp.num_states(), A = mdp.num_actions(), H = mdp.horizon();
    const QVAdvantage adv = compute_q_and_advantage(mdp, policy, reward);

    std::vector<double> per_step(static_cast<std::size_t>(H), 0.0);
    for (int h = 0; h < H; ++h) {
        if (policy_class.is_masked()) {
            double err = 0.0;
            for (int s = 0; s < S; ++s) {
                const double p = rho.at(h, s);
                if (p <= 0.0) continue;
                const double* row = adv.adv_row(h, s);
                err += p * (max_over_all(row, A) - max_over_allowed(row, policy_class, s));
            }
            per_step[static_cast<std::size_t>(h)] = err;
        } else {
            double unrestricted = 0.0;
            for (int s = 0; s < S; ++s) {
                const double p = rho.at(h, s);
                if (p > 0.0) unrestricted += p * max_over_all(adv.adv_row(h, s), A);
            }
            double best_member = -std::numeric_limits<double>::infinity();
            for (const auto& m : policy_class.members) {
                double val = 0.0;
                for (int s = 0; s < S; ++s) {
                    const double p = rho.at(h, s);
                    if (p > 0.0)
                        val += p * kernels::dot(m.row(h, s), adv.adv_row(h, s),
                                                static_cast<std::size_t>(A));
                }
                best_member = std::max(best_member, val);
            }
            per_step[static_cast<std::size_t>(h)] = unrestricted - best_member;
        }
    }
    return per_step;
}

double reward_indexed_completeness(const TabularMdp& mdp, const PolicyClass& policy_class,
                                   const NonstationaryPolicy& policy, const RewardTable& reward,
                                   const ResetDistribution& rho) {
    const auto per_step = reward_indexed_completeness_per_step(mdp, policy_class, policy, reward, rho);
    return *std::max_element(per_step.begin(), per_step.end());
}

CompletenessReport reward_agnostic_completeness(const TabularMdp& mdp,
                                                const PolicyClass& policy_class,
                                                const RewardClass& reward_class,
                                                const ResetDistribution& rho,
                                                const CompletenessOptions& options) {
    check_class_dims(mdp, policy_class);
    check_reset_dims(mdp, rho);
    reward_class.validate();
    const int H = mdp.horizon(), A = mdp.num_actions();
    const int K = reward_class.size();

    CompletenessReport report;
    report.pair_cols = K;

    if (!policy_class.is_masked()) {
        const std::uint64_t pairs =
            saturating_mul(policy_class.members.size(), static_cast<std::uint64_t>(K));
        if (pairs > options.max_evaluations)
            throw ConfigError("completeness: explicit list needs " + std::to_string(pairs) +
                              " evaluations, budget is " + std::to_string(options.max_evaluations));
        const bool store = pairs <= options.pair_table_limit;
        if (store) report.per_pair_errors.assign(pairs, 0.0);
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t m = 0; m < policy_class.members.size(); ++m) {
            for (int k = 0; k < K; ++k) {
                const double err = reward_indexed_completeness(
                    mdp, policy_class, policy_class.members[m], reward_class.base_rewards[k], rho);
                if (store) report.per_pair_errors[m * K + k] = err;
                if (err > best) {
                    best = err;
                    report.worst_policy_index = m;
                    report.worst_reward_index = k;
                }
            }
        }
        report.epsilon_pi = best;
        report.evaluations = pairs;
        report.worst_policy = policy_class.members[report.worst_policy_index];
        if (store) report.pair_rows = policy_class.members.size();
        return report;
    }

    const MaskedEnumeration enumr(policy_class, H);
    const std::uint64_t members = policy_class.member_count(H);
    const std::uint64_t pairs = saturating_mul(members, static_cast<std::uint64_t>(K));

    if (pairs <= options.max_evaluations) {
        // Exact enumeration over all deterministic members.
        const bool store = pairs <= options.pair_table_limit;
        if (store) report.per_pair_errors.assign(pairs, 0.0);
        double* table = store ? report.per_pair_errors.data() : nullptr;

        const unsigned workers = worker_count(members);
        std::vector<std::future<ChunkBest>> futures;
        futures.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            const std::uint64_t lo = members * w / workers;
            const std::uint64_t hi = members * (w + 1) / workers;
            futures.push_back(std::async(std::launch::async, [&, lo, hi]() {
                ChunkBest out;
                std::vector<int> digits;
                enumr.decode(lo, digits);
                std::vector<double> v_next, v_cur, q_buf(static_cast<std::size_t>(A));
                std::vector<int> best_digits;
                for (std::uint64_t m = lo; m < hi; ++m) {
                    for (int k = 0; k < K; ++k) {
                        const double err =
                            det_member_error(mdp, policy_class, enumr, digits,
                                             reward_class.base_rewards[static_cast<std::size_t>(k)],
                                             &rho, nullptr, v_next, v_cur, q_buf);
                        if (table != nullptr) table[m * K + k] = err;
                        if (err > out.err) {
                            out.err = err;
                            out.policy_index = m;
                            out.reward_index = k;
                            out.digits = digits;
                        }
                    }
                    enumr.advance(digits);
                }
                return out;
            }));
        }
        ChunkBest best;
        for (auto& f : futures) {
            ChunkBest c = f.get();
            if (c.err > best.err) best = std::move(c);
        }
        report.epsilon_pi = std::max(best.err, 0.0);
        report.evaluations = pairs;
        report.worst_policy_index = best.policy_index;
        report.worst_reward_index = best.reward_index;
        report.worst_policy = enumr.materialize(best.digits, A);
        if (store) report.pair_rows = members;
        return report;
    }

    if (!options.allow_lower_bound)
        throw ConfigError("completeness: class has " + std::to_string(members) +
                          " deterministic members (" + std::to_string(pairs) +
                          " evaluations), budget is " + std::to_string(options.max_evaluations) +
                          " and lower-bound fallback is disabled");

    // Sampled lower bound over uniformly drawn deterministic members.
    std::uint64_t samples = options.sample_count;
    if (K > 0) samples = std::min(samples, options.max_evaluations / static_cast<std::uint64_t>(K));
    samples = std::max<std::uint64_t>(samples, 1);

    rng::SplitMix64 gen = rng::stream(options.sample_seed, "completeness-sample");
    std::vector<int> digits(enumr.radix.size(), 0);
    std::vector<double> v_next, v_cur, q_buf(static_cast<std::size_t>(A));
    ChunkBest best;
    for (std::uint64_t i = 0; i < samples; ++i) {
        for (std::size_t p = 0; p < digits.size(); ++p)
            digits[p] = rng::uniform_int(gen, enumr.radix[p]);
        for (int k = 0; k < K; ++k) {
            const double err = det_member_error(
                mdp, policy_class, enumr, digits,
                reward_class.base_rewards[static_cast<std::size_t>(k)], &rho, nullptr, v_next,
                v_cur, q_buf);
            if (err > best.err) {
                best.err = err;
                best.policy_index = i;
                best.reward_index = k;
                best.digits = digits;
            }
        }
    }
    report.epsilon_pi = std::max(best.err, 0.0);
    report.lower_bound_only = true;
    report.evaluations = saturating_mul(samples, static_cast<std::uint64_t>(K));
    report.worst_policy_index = best.policy_index;
    report.worst_reward_index = best.reward_index;
    report.worst_policy = enumr.materialize(best.digits, A);
    return report;
}

NonstationaryPolicy masked_optimal_policy(const TabularMdp& mdp, const PolicyClass& policy_class,
                                          const RewardTable& reward) {
    check_class_dims(mdp, policy_class);
    detail::check_reward_dims(mdp, reward);
    if (!policy_class.is_masked())
        throw ConfigError("masked_optimal_policy: class is not masked");
    const int S = mdp.num_states(), A = mdp.num_actions(), H = mdp.horizon();

    std::vector<int> actions(static_cast<std::size_t>(H) * S, 0);
    std::vector<double> v_next(static_cast<std::size_t>(S), 0.0);
    std::vector<double> v_cur(static_cast<std::size_t>(S), 0.0);
    for (int h = H - 1; h >= 0; --h) {
        for (int s = 0; s < S; ++s) {
            double best_q = -std::numeric_limits<double>::infinity();
            int best_a = -1;
            for (int a = 0; a < A; ++a) {
                if (!policy_class.action_allowed(s, a)) continue;
                double q = reward(s, a);
                if (h + 1 < H)
                    q += kernels::dot(mdp.transition_row(h, s, a), v_next.data(),
                                      static_cast<std::size_t>(S));
                if (q > best_q) {
                    best_q = q;
                    best_a = a;
                }
            }
            actions[static_cast<std::size_t>(h) * S + s] = best_a;
            v_cur[s] = best_q;
        }
        v_next = v_cur;
    }
    return NonstationaryPolicy::deterministic(H, S, A, actions);
}

PiStarResult best_realizable_policy(const TabularMdp& mdp, const PolicyClass& policy_class,
                                    const RewardClass& reward_class,
                                    const NonstationaryPolicy& expert,
                                    std::uint64_t enumeration_budget) {
    check_class_dims(mdp, policy_class);
    detail::check_policy_dims(mdp, expert);
    reward_class.validate();
    const int K = reward_class.size();
    const int H = mdp.horizon(), A = mdp.num_actions();

    std::vector<double> expert_values(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k)
        expert_values[static_cast<std::size_t>(k)] =
            policy_value(mdp, expert, reward_class.base_rewards[static_cast<std::size_t>(k)]);

    const auto worst_gap = [&](const NonstationaryPolicy& pi) {
        double g = -std::numeric_limits<double>::infinity();
        for (int k = 0; k < K; ++k)
            g = std::max(g, expert_values[static_cast<std::size_t>(k)] -
                                policy_value(mdp, pi,
                                             reward_class.base_rewards[static_cast<std::size_t>(k)]));
        return g;
    };

    PiStarResult result;

    if (!policy_class.is_masked()) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_i = 0;
        for (std::size_t i = 0; i < policy_class.members.size(); ++i) {
            const double g = worst_gap(policy_class.members[i]);
            if (g < best) {
                best = g;
                best_i = i;
            }
        }
        result.policy = policy_class.members[best_i];
        result.worst_case_gap = best;
        result.method = "explicit-scan";
        return result;
    }

    const std::uint64_t members = policy_class.member_count(H);
    const std::uint64_t evals = saturating_mul(members, static_cast<std::uint64_t>(K));
    if (evals <= enumeration_budget) {
        const MaskedEnumeration enumr(policy_class, H);
        std::vector<int> digits;
        enumr.decode(0, digits);
        std::vector<double> v_next, v_cur, q_buf(static_cast<std::size_t>(A));
        double best = std::numeric_limits<double>::infinity();
        std::vector<int> best_digits = digits;
        std::uint64_t m = 0;
        do {
            double g = -std::numeric_limits<double>::infinity();
            for (int k = 0; k < K; ++k) {
                double value = 0.0;
                det_member_error(mdp, policy_class, enumr, digits,
                                 reward_class.base_rewards[static_cast<std::size_t>(k)], nullptr,
                                 &value, v_next, v_cur, q_buf);
                g = std::max(g, expert_values[static_cast<std::size_t>(k)] - value);
            }
            if (g < best) {
                best = g;
                best_digits = digits;
            }
            ++m;
        } while (m < members && enumr.advance(digits));
        result.policy = enumr.materialize(best_digits, A);
        result.worst_case_gap = best;
        result.method = "enumeration";
        return result;
    }

    // Large masked class: per-corner backward-induction optima.  If one of
    // them attains the lower bound max_k [J(expert,k) - v_k*] that holds for
    // every class member, it is a global argmin.
    std::vector<NonstationaryPolicy> candidates;
    candidates.reserve(static_cast<std::size_t>(K));
    double lower_bound = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < K; ++k) {
        candidates.push_back(masked_optimal_policy(
            mdp, policy_class, reward_class.base_rewards[static_cast<std::size_t>(k)]));
        const double v_star =
            policy_value(mdp, candidates.back(), reward_class.base_rewards[static_cast<std::size_t>(k)]);
        lower_bound = std::max(lower_bound, expert_values[static_cast<std::size_t>(k)] - v_star);
    }
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const double g = worst_gap(candidates[i]);
        if (g < best) {
            best = g;
            best_i = i;
        }
    }
    if (best <= lower_bound + 1e-12) {
        result.policy = candidates[best_i];
        result.worst_case_gap = best;
        result.method = "aligned-corners";
        return result;
    }
    throw ConfigError("best_realizable_policy: class has " + std::to_string(members) +
                      " deterministic members, budget is " + std::to_string(enumeration_budget) +
                      " and per-corner optima are not aligned");
}

std::vector<NonstationaryPolicy> enumerate_members(const PolicyClass& policy_class, int horizon,
                                                   std::uint64_t limit) {
    if (!policy_class.is_masked()) return policy_class.members;
    const std::uint64_t count = policy_class.member_count(horizon);
    if (count > limit)
        throw ConfigError("enumerate_members: class has " + std::to_string(count) +
                          " members, limit is " + std::to_string(limit));
    const MaskedEnumeration enumr(policy_class, horizon);
    std::vector<NonstationaryPolicy> members;
    members.reserve(count);
    std::vector<int> digits;
    enumr.decode(0, digits);
    std::uint64_t m = 0;
    do {
        members.push_back(enumr.materialize(digits, policy_class.num_actions));
        ++m;
    } while (m < count && enumr.advance(digits));
    return members;
}

double coverage_coefficient(const OccupancyTensor& numerator, const OccupancyTensor& denominator,
                            bool per_step) {
    if (numerator.num_states != denominator.num_states ||
        numerator.num_actions != denominator.num_actions ||
        numerator.horizon != denominator.horizon)
        throw ConfigError("coverage coefficient: occupancy dimensions differ");

    const auto ratio_max = [](const std::vector<double>& num, const std::vector<double>& den) {
        double best = 0.0;
        for (std::size_t i = 0; i < num.size(); ++i) {
            if (num[i] <= 0.0) continue;
            if (den[i] <= 0.0) return std::numeric_limits<double>::infinity();
            best = std::max(best, num[i] / den[i]);
        }
        return best;
    };

    if (!per_step) return ratio_max(numerator.averaged, denominator.averaged);
    return ratio_max(numerator.per_step, denominator.per_step);
}

NonstationaryPolicy behavioral_cloning(const DemoDataset& demos, const PolicyClass& policy_class) {
    if (!policy_class.is_masked())
        throw ConfigError("behavioral cloning: requires a masked policy class");
    if (demos.records.empty()) throw ConfigError("behavioral cloning: empty dataset");
    if (demos.num_states != policy_class.num_states ||
        demos.num_actions != policy_class.num_actions)
        throw ConfigError("behavioral cloning: demo dimensions do not match class");

    const int H = demos.horizon, S = demos.num_states, A = demos.num_actions;
    std::vector<std::int64_t> counts(static_cast<std::size_t>(H) * S * A, 0);
    for (const auto& rec : demos.records)
        ++counts[(static_cast<std::size_t>(rec.h - 1) * S + rec.s) * A + rec.a];

    NonstationaryPolicy policy(H, S, A);
    for (int h = 0; h < H; ++h)
        for (int s = 0; s < S; ++s) {
            const std::int64_t* c = counts.data() + (static_cast<std::size_t>(h) * S + s) * A;
            std::int64_t total = 0;
            for (int a = 0; a < A; ++a) total += c[a];
            double* row = policy.row(h, s);
            if (total == 0) {
                const int n_allow = policy_class.allowed_count(s);
                for (int a = 0; a < A; ++a)
                    row[a] = policy_class.action_allowed(s, a) ? 1.0 / n_allow : 0.0;
                continue;
            }
            int best = -1;
            for (int a = 0; a < A; ++a) {
                if (!policy_class.action_allowed(s, a)) continue;
                if (best < 0 || c[a] > c[best]) best = a;
            }
            row[best] = 1.0;
        }
    return policy;
}

}  // namespace irlab
