#include "irlab/scenarios.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "irlab/rng.hpp"

namespace irlab {

void Scenario::validate() const {
    expert.validate();
    detail::check_policy_dims(mdp, expert);
    policy_class.validate();
    if (policy_class.num_states != mdp.num_states() ||
        policy_class.num_actions != mdp.num_actions())
        throw ConfigError("scenario " + id + ": policy class dimension mismatch");
    reward_class.validate();
    if (reward_class.rstar_index < 0)
        throw ConfigError("scenario " + id + ": true reward not in reward class");
    if (offline_policy) {
        offline_policy->validate();
        detail::check_policy_dims(mdp, *offline_policy);
    }
    for (int s : terminal_states)
        if (s < 0 || s >= mdp.num_states())
            throw ConfigError("scenario " + id + ": terminal state out of range");
}

namespace {

// ---- corridor-split maze ----
//
// Row-2 entry corridor E_0..E_{e-1}, junction J, row-1 top fork T_0..T_{b-1},
// row-3 bottom fork B_0..B_{b-1}; the two goal states are entered from the
// last fork cells.  Four move actions (up/down/left/right); bumping a wall
// stays in place.

struct SplitMazeLayout {
    int entry_len;
    int branch_len;
    int junction;
    int top0, bot0, g_top, g_bot;
    int num_states;

    explicit SplitMazeLayout(int e, int b)
        : entry_len(e),
          branch_len(b),
          junction(e),
          top0(e + 1),
          bot0(e + 1 + b),
          g_top(e + 1 + 2 * b),
          g_bot(e + 2 + 2 * b),
          num_states(e + 3 + 2 * b) {}

    int top(int i) const { return top0 + i; }
    int bot(int i) const { return bot0 + i; }

    // Deterministic successor of (state, action); actions 0..3 = up/down/left/right.
    int dest(int s, int a) const {
        const int b = branch_len;
        if (s == g_top || s == g_bot) return s;
        if (s < entry_len) {  // entry corridor
            if (a == 2) return s > 0 ? s - 1 : s;
            if (a == 3) return s + 1;  // next entry cell or the junction
            return s;
        }
        if (s == junction) {
            if (a == 0) return top(0);
            if (a == 1) return bot(0);
            if (a == 2) return entry_len - 1 >= 0 ? entry_len - 1 : s;
            return s;
        }
        if (s >= top0 && s < top0 + b) {
            const int i = s - top0;
            if (a == 1) return i == 0 ? junction : (i == b - 1 ? g_top : s);
            if (a == 2) return i > 0 ? top(i - 1) : s;
            if (a == 3) return i < b - 1 ? top(i + 1) : s;
            return s;
        }
        const int i = s - bot0;
        if (a == 0) return i == 0 ? junction : (i == b - 1 ? g_bot : s);
        if (a == 2) return i > 0 ? bot(i - 1) : s;
        if (a == 3) return i < b - 1 ? bot(i + 1) : s;
        return s;
    }
};

std::vector<double> deterministic_kernel(int S, int A, const std::function<int(int, int)>& dest) {
    std::vector<double> kernel(static_cast<std::size_t>(S) * A * S, 0.0);
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a)
            kernel[(static_cast<std::size_t>(s) * A + a) * S + dest(s, a)] = 1.0;
    return kernel;
}

NonstationaryPolicy stationary_deterministic(int H, int S, int A,
                                             const std::vector<int>& state_actions) {
    std::vector<int> actions(static_cast<std::size_t>(H) * S);
    for (int h = 0; h < H; ++h)
        for (int s = 0; s < S; ++s)
            actions[static_cast<std::size_t>(h) * S + s] = state_actions[static_cast<std::size_t>(s)];
    return NonstationaryPolicy::deterministic(H, S, A, actions);
}

}  // namespace

Scenario build_corridor_split_maze(const std::string& id, int entry_len, int branch_len,
                                   int horizon, const std::string& offline_kind) {
    if (entry_len < 1 || branch_len < 2) throw ConfigError("split maze: entry >= 1, branch >= 2");
    const SplitMazeLayout L(entry_len, branch_len);
    const int S = L.num_states, A = 4, H = horizon;
    const int path_moves = entry_len + branch_len + 1;
    const int goal_steps = H - path_moves;
    if (goal_steps < 1) throw ConfigError("split maze: horizon too short for the corridor");

    RewardTable rstar(S, A, 0.0);
    RewardTable r_bottom_goal(S, A, 0.0);
    const double top_rate = 1.0 / goal_steps;
    const double bot_rate = 0.9 / goal_steps;
    for (int a = 0; a < A; ++a) {
        rstar.at(L.g_top, a) = top_rate;
        rstar.at(L.g_bot, a) = bot_rate;
        r_bottom_goal.at(L.g_bot, a) = bot_rate;
    }

    std::vector<double> mu(static_cast<std::size_t>(S), 0.0);
    mu[0] = 1.0;

    TabularMdp mdp = TabularMdp::time_homogeneous(
        S, A, H, deterministic_kernel(S, A, [&](int s, int a) { return L.dest(s, a); }), rstar, mu);

    // Class mask: every action whose successor is the first top-fork cell is
    // unavailable (the blocked cell).
    std::vector<std::uint8_t> allowed(static_cast<std::size_t>(S) * A, 1);
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a)
            if (s != L.top(0) && L.dest(s, a) == L.top(0))
                allowed[static_cast<std::size_t>(s) * A + a] = 0;
    PolicyClass pc = PolicyClass::masked(S, A, std::move(allowed));

    // Expert walks the top fork.
    std::vector<int> expert_actions(static_cast<std::size_t>(S), 0);
    for (int i = 0; i < entry_len; ++i) expert_actions[static_cast<std::size_t>(i)] = 3;
    expert_actions[static_cast<std::size_t>(L.junction)] = 0;
    for (int i = 0; i < branch_len; ++i)
        expert_actions[static_cast<std::size_t>(L.top(i))] = i == branch_len - 1 ? 1 : 3;
    for (int i = 0; i < branch_len; ++i)
        expert_actions[static_cast<std::size_t>(L.bot(i))] = i == branch_len - 1 ? 0 : 3;
    NonstationaryPolicy expert = stationary_deterministic(H, S, A, expert_actions);

    RewardClass rc;
    rc.base_rewards = {rstar, r_bottom_goal};
    rc.rstar_index = 0;

    Scenario sc(id, std::move(mdp), std::move(expert), std::move(pc), std::move(rc));

    // Offline behavior: either the bottom-fork walker (the realizable optimum)
    // or a corridor policy that stalls at the junction.
    std::vector<int> offline_actions(static_cast<std::size_t>(S), 0);
    for (int i = 0; i < entry_len; ++i) offline_actions[static_cast<std::size_t>(i)] = 3;
    for (int i = 0; i < branch_len; ++i)
        offline_actions[static_cast<std::size_t>(L.top(i))] = 1;  // class-allowed filler
    for (int i = 0; i < branch_len; ++i)
        offline_actions[static_cast<std::size_t>(L.bot(i))] = i == branch_len - 1 ? 0 : 3;
    if (offline_kind == "pistar") {
        offline_actions[static_cast<std::size_t>(L.junction)] = 1;
    } else if (offline_kind == "corridor") {
        offline_actions[static_cast<std::size_t>(L.junction)] = 3;  // wall bump, stays put
    } else {
        throw ConfigError("split maze: unknown offline kind " + offline_kind);
    }
    sc.offline_policy = stationary_deterministic(H, S, A, offline_actions);

    sc.documented_expert_value = 1.0;
    sc.documented_realizable_value = 0.9;
    sc.terminal_states = {L.g_top, L.g_bot};
    sc.notes = "blocked top fork; entry=" + std::to_string(entry_len) +
               " branch=" + std::to_string(branch_len) + " goal_steps=" +
               std::to_string(goal_steps) + " offline=" + offline_kind;
    sc.validate();
    return sc;
}

Scenario build_block_maze() { return build_corridor_split_maze("block_maze", 2, 3, 12); }

Scenario build_time_constraint_maze() {
    // U corridor of 19 cells: 11 down the left leg, 3 along the bottom, 5 up
    // the right leg to the goal.  States are (cell, phase) pairs; the phase
    // flips to "late" on every transition landing at step 11 or later.
    constexpr int kCells = 19;
    constexpr int kGoal = kCells - 1;
    constexpr int kFlipStep = 10;  // 0-based landing index of the first late step
    const int S = 2 * kCells, A = 5, H = 20;

    std::array<std::pair<int, int>, kCells> coord{};
    for (int i = 0; i <= 10; ++i) coord[static_cast<std::size_t>(i)] = {1 + i, 1};
    coord[11] = {12, 1};
    coord[12] = {12, 2};
    coord[13] = {12, 3};
    for (int i = 14; i <= 18; ++i) coord[static_cast<std::size_t>(i)] = {12 - (i - 13), 3};

    const auto cell_at = [&](int row, int col) {
        for (int i = 0; i < kCells; ++i)
            if (coord[static_cast<std::size_t>(i)] == std::pair<int, int>{row, col}) return i;
        return -1;
    };
    const auto move_cell = [&](int cell, int a) {
        if (a == 4) return cell;
        auto [row, col] = coord[static_cast<std::size_t>(cell)];
        if (a == 0) --row;
        if (a == 1) ++row;
        if (a == 2) --col;
        if (a == 3) ++col;
        const int dest = cell_at(row, col);
        return dest >= 0 ? dest : cell;
    };

    std::vector<double> transitions(static_cast<std::size_t>(H) * S * A * S, 0.0);
    for (int h = 0; h < H; ++h)
        for (int s = 0; s < S; ++s)
            for (int a = 0; a < A; ++a) {
                const int cell = s % kCells;
                const int phase = s / kCells;
                const int dest_cell = move_cell(cell, a);
                const int dest_phase = (phase == 1 || h + 1 >= kFlipStep) ? 1 : 0;
                const int dest = dest_cell + kCells * dest_phase;
                transitions[((static_cast<std::size_t>(h) * S + s) * A + a) * S + dest] = 1.0;
            }

    const auto shape = [&](int cell) {
        if (cell == kGoal) return 1.0;
        const double x = static_cast<double>(cell) / kGoal;
        return 0.5 * x * x;
    };
    RewardTable rstar(S, A, 0.0);
    RewardTable r_goal(S, A, 0.0);
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) {
            rstar.at(s, a) = shape(s % kCells);
            if (s % kCells == kGoal) r_goal.at(s, a) = 1.0;
        }

    std::vector<double> mu(static_cast<std::size_t>(S), 0.0);
    mu[0] = 1.0;

    TabularMdp mdp(S, A, H, std::move(transitions), rstar, std::move(mu));

    // Late-phase states allow only "stay": the class stops acting after the
    // flip, the expert does not.
    std::vector<std::uint8_t> allowed(static_cast<std::size_t>(S) * A, 0);
    for (int s = 0; s < S; ++s) {
        if (s / kCells == 0)
            for (int a = 0; a < A; ++a) allowed[static_cast<std::size_t>(s) * A + a] = 1;
        else
            allowed[static_cast<std::size_t>(s) * A + 4] = 1;
    }
    PolicyClass pc = PolicyClass::masked(S, A, std::move(allowed));

    // Expert walks the full corridor (both phases); class members cannot.
    std::vector<int> forward(static_cast<std::size_t>(kCells), 4);
    for (int i = 0; i < kGoal; ++i) {
        auto [row, col] = coord[static_cast<std::size_t>(i)];
        auto [nrow, ncol] = coord[static_cast<std::size_t>(i + 1)];
        if (nrow == row - 1) forward[static_cast<std::size_t>(i)] = 0;
        if (nrow == row + 1) forward[static_cast<std::size_t>(i)] = 1;
        if (ncol == col - 1) forward[static_cast<std::size_t>(i)] = 2;
        if (ncol == col + 1) forward[static_cast<std::size_t>(i)] = 3;
    }
    std::vector<int> expert_actions(static_cast<std::size_t>(S), 4);
    std::vector<int> offline_actions(static_cast<std::size_t>(S), 4);
    for (int s = 0; s < S; ++s) {
        expert_actions[static_cast<std::size_t>(s)] = forward[static_cast<std::size_t>(s % kCells)];
        offline_actions[static_cast<std::size_t>(s)] =
            s / kCells == 0 ? forward[static_cast<std::size_t>(s % kCells)] : 4;
    }
    NonstationaryPolicy expert = stationary_deterministic(H, S, A, expert_actions);

    RewardClass rc;
    rc.base_rewards = {rstar, r_goal};
    rc.rstar_index = 0;

    Scenario sc("time_maze", std::move(mdp), std::move(expert), std::move(pc), std::move(rc));
    sc.offline_policy = stationary_deterministic(H, S, A, offline_actions);
    sc.documented_expert_value = policy_value(sc.mdp, sc.expert, sc.reward_class.rstar());
    sc.documented_realizable_value =
        policy_value(sc.mdp, *sc.offline_policy, sc.reward_class.rstar());
    sc.terminal_states = {kGoal, kGoal + kCells};
    sc.notes = "U corridor, phase flip after 10 moves; late-phase states are stay-only for the "
               "class";
    sc.validate();
    return sc;
}

namespace {

std::vector<double> ladder_offsets(int list_size, bool include_expert) {
    static const std::vector<double> table16 = {0.0,  0.0025, 0.005, 0.0075, 0.01, 0.015,
                                                0.02, 0.03,   0.04,  0.06,   0.08, 0.11,
                                                0.16, 0.22,   0.30,  0.40};
    static const std::vector<double> table4 = {0.0, 0.01, 0.05, 0.20};
    const std::vector<double>& table = list_size > 8 ? table16 : table4;
    std::vector<double> offsets(table.begin(), table.end());
    if (!include_expert) offsets.erase(offsets.begin());
    return offsets;
}

}  // namespace

Scenario build_stile_ladder(const std::string& id, int list_size, bool include_expert) {
    const int S = 1, A = 2, H = 1;
    constexpr double kExpertP = 0.5;

    RewardTable rstar(S, A, 0.0);
    rstar.at(0, 0) = 0.8;
    rstar.at(0, 1) = 0.2;
    std::vector<double> kernel(static_cast<std::size_t>(S) * A * S, 1.0);
    TabularMdp mdp = TabularMdp::time_homogeneous(S, A, H, kernel, rstar, {1.0});

    const auto make_member = [&](double p) {
        NonstationaryPolicy pi(H, S, A);
        pi.at(0, 0, 0) = 1.0 - p;
        pi.at(0, 0, 1) = p;
        return pi;
    };

    std::vector<NonstationaryPolicy> members;
    for (double off : ladder_offsets(list_size, include_expert))
        members.push_back(make_member(kExpertP + off));

    NonstationaryPolicy expert = make_member(kExpertP);
    RewardClass rc;
    rc.base_rewards = {rstar};
    rc.rstar_index = 0;

    Scenario sc(id, std::move(mdp), std::move(expert), PolicyClass::explicit_list(std::move(members)),
                std::move(rc));
    sc.documented_expert_value = 0.8 - 0.6 * kExpertP;
    if (include_expert) sc.documented_realizable_value = *sc.documented_expert_value;
    sc.notes = "two-action bandit ladder around the expert mixture; offsets span several scales";
    sc.validate();
    return sc;
}

TabularMdp random_mdp(std::uint64_t seed, int num_states, int num_actions, int horizon) {
    rng::SplitMix64 gen = rng::stream(seed, "random-mdp");
    std::vector<double> transitions;
    transitions.reserve(static_cast<std::size_t>(horizon) * num_states * num_actions * num_states);
    for (int h = 0; h < horizon; ++h)
        for (int s = 0; s < num_states; ++s)
            for (int a = 0; a < num_actions; ++a) {
                auto row = rng::random_distribution(gen, num_states);
                transitions.insert(transitions.end(), row.begin(), row.end());
            }
    RewardTable reward(num_states, num_actions, 0.0);
    for (double& v : reward.values) v = gen.next_double();
    std::vector<double> mu = rng::random_distribution(gen, num_states);
    return TabularMdp(num_states, num_actions, horizon, std::move(transitions), std::move(reward),
                      std::move(mu));
}

NonstationaryPolicy random_policy(std::uint64_t seed, int horizon, int num_states,
                                  int num_actions) {
    rng::SplitMix64 gen = rng::stream(seed, "random-policy");
    NonstationaryPolicy pi(horizon, num_states, num_actions);
    for (int h = 0; h < horizon; ++h)
        for (int s = 0; s < num_states; ++s) {
            auto row = rng::random_distribution(gen, num_actions);
            std::copy(row.begin(), row.end(), pi.row(h, s));
        }
    return pi;
}

RewardTable random_reward(std::uint64_t seed, int num_states, int num_actions) {
    rng::SplitMix64 gen = rng::stream(seed, "random-reward");
    RewardTable reward(num_states, num_actions, 0.0);
    for (double& v : reward.values) v = gen.next_double();
    return reward;
}

Scenario build_random_masked(const std::string& id, std::uint64_t seed, int num_states,
                             int num_actions, int horizon, std::uint64_t max_member_pairs) {
    TabularMdp mdp = random_mdp(seed, num_states, num_actions, horizon);
    rng::SplitMix64 gen = rng::stream(seed, "random-mask");

    std::vector<std::uint8_t> allowed(static_cast<std::size_t>(num_states) * num_actions, 0);
    for (int s = 0; s < num_states; ++s) {
        int count = 0;
        for (int a = 0; a < num_actions; ++a) {
            const bool keep = gen.next_double() < 0.6;
            allowed[static_cast<std::size_t>(s) * num_actions + a] = keep ? 1 : 0;
            count += keep ? 1 : 0;
        }
        if (count == 0)
            allowed[static_cast<std::size_t>(s) * num_actions + rng::uniform_int(gen, num_actions)] = 1;
    }
    // Trim the mask until the full enumeration (times two base rewards) fits
    // the requested budget.
    const double per_step_cap =
        std::pow(static_cast<double>(max_member_pairs) / 2.0, 1.0 / horizon);
    while (true) {
        double product = 1.0;
        for (int s = 0; s < num_states; ++s) {
            int count = 0;
            for (int a = 0; a < num_actions; ++a)
                count += allowed[static_cast<std::size_t>(s) * num_actions + a];
            product *= count;
        }
        if (product <= per_step_cap) break;
        // Drop the highest-index allowed action of the widest state.
        int widest = -1, widest_count = 1;
        for (int s = 0; s < num_states; ++s) {
            int count = 0;
            for (int a = 0; a < num_actions; ++a)
                count += allowed[static_cast<std::size_t>(s) * num_actions + a];
            if (count > widest_count) {
                widest = s;
                widest_count = count;
            }
        }
        if (widest < 0) break;
        for (int a = num_actions - 1; a >= 0; --a)
            if (allowed[static_cast<std::size_t>(widest) * num_actions + a]) {
                allowed[static_cast<std::size_t>(widest) * num_actions + a] = 0;
                break;
            }
    }
    PolicyClass pc = PolicyClass::masked(num_states, num_actions, std::move(allowed));

    NonstationaryPolicy expert =
        masked_optimal_policy(mdp, PolicyClass::full(num_states, num_actions), mdp.true_reward());
    NonstationaryPolicy offline = masked_optimal_policy(mdp, pc, mdp.true_reward());

    RewardClass rc;
    rc.base_rewards = {mdp.true_reward(), random_reward(seed + 0x9E37, num_states, num_actions)};
    rc.rstar_index = 0;

    Scenario sc(id, std::move(mdp), std::move(expert), std::move(pc), std::move(rc));
    sc.offline_policy = std::move(offline);
    sc.notes = "seeded random masked scenario; expert = unmasked optimum, offline = masked optimum";
    sc.validate();
    return sc;
}

namespace {

struct SplitVariant {
    int entry, branch, extra;
};

constexpr std::array<SplitVariant, 10> kBlockVariants{{{1, 2, 4},
                                                       {1, 3, 4},
                                                       {2, 2, 4},
                                                       {2, 3, 4},
                                                       {3, 3, 4},
                                                       {1, 2, 6},
                                                       {2, 3, 6},
                                                       {3, 2, 6},
                                                       {2, 4, 6},
                                                       {3, 4, 8}}};

constexpr std::array<SplitVariant, 3> kCorridorVariants{{{2, 3, 6}, {1, 2, 6}, {3, 3, 5}}};

}  // namespace

std::vector<std::string> scenario_ids() {
    std::vector<std::string> ids = {"block_maze", "time_maze", "stile_ladder_4", "stile_ladder_16",
                                    "stile_ladder_mis_4", "stile_ladder_mis_16"};
    for (std::size_t i = 0; i < kBlockVariants.size(); ++i)
        ids.push_back("block_maze_v" + std::to_string(i));
    for (std::size_t i = 0; i < kCorridorVariants.size(); ++i)
        ids.push_back("block_maze_x" + std::to_string(i));
    for (int i = 0; i < 5; ++i) ids.push_back("rand_masked_" + std::to_string(i));
    return ids;
}

Scenario build_scenario(const std::string& id) {
    if (id == "block_maze") return build_block_maze();
    if (id == "time_maze") return build_time_constraint_maze();
    if (id == "stile_ladder_4") return build_stile_ladder(id, 4, true);
    if (id == "stile_ladder_16") return build_stile_ladder(id, 16, true);
    if (id == "stile_ladder_mis_4") return build_stile_ladder(id, 4, false);
    if (id == "stile_ladder_mis_16") return build_stile_ladder(id, 16, false);
    if (id.rfind("block_maze_v", 0) == 0) {
        const std::size_t i = std::stoul(id.substr(12));
        if (i < kBlockVariants.size()) {
            const auto& v = kBlockVariants[i];
            return build_corridor_split_maze(id, v.entry, v.branch,
                                             v.entry + v.branch + 1 + v.extra, "pistar");
        }
    }
    if (id.rfind("block_maze_x", 0) == 0) {
        const std::size_t i = std::stoul(id.substr(12));
        if (i < kCorridorVariants.size()) {
            const auto& v = kCorridorVariants[i];
            return build_corridor_split_maze(id, v.entry, v.branch,
                                             v.entry + v.branch + 1 + v.extra, "corridor");
        }
    }
    if (id.rfind("rand_masked_", 0) == 0) {
        const std::size_t i = std::stoul(id.substr(12));
        if (i < 5) {
            const int S = (i % 2 == 0) ? 3 : 4;
            return build_random_masked(id, 101 + i, S, 2, 3, 4000);
        }
    }
    throw ConfigError("unknown scenario id: " + id);
}

}  // namespace irlab
