#include "irlab/serialize.hpp"

#include <fstream>
#include <sstream>

#include "irlab/rng.hpp"

namespace irlab {

namespace {

Json grid2(const std::vector<double>& flat, int rows, int cols) {
    Json out = Json::array();
    for (int r = 0; r < rows; ++r) {
        Json row = Json::array();
        for (int c = 0; c < cols; ++c)
            row.push_back(flat[static_cast<std::size_t>(r) * cols + c]);
        out.push_back(std::move(row));
    }
    return out;
}

std::vector<double> flat2(const Json& j, int* rows_out, int* cols_out) {
    if (!j.is_array() || j.empty() || !j.front().is_array())
        throw ConfigError("json: expected a 2-d array");
    const int rows = static_cast<int>(j.size());
    const int cols = static_cast<int>(j.front().size());
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(rows) * cols);
    for (const auto& row : j) {
        if (static_cast<int>(row.size()) != cols)
            throw ConfigError("json: ragged 2-d array");
        for (const auto& v : row) flat.push_back(v.get<double>());
    }
    if (rows_out != nullptr) *rows_out = rows;
    if (cols_out != nullptr) *cols_out = cols;
    return flat;
}

}  // namespace

Json to_json(const RewardTable& reward) {
    return grid2(reward.values, reward.num_states, reward.num_actions);
}

RewardTable reward_from_json(const Json& j) {
    RewardTable r;
    r.values = flat2(j, &r.num_states, &r.num_actions);
    r.validate();
    return r;
}

Json to_json(const TabularMdp& mdp) {
    const int S = mdp.num_states(), A = mdp.num_actions(), H = mdp.horizon();
    Json j;
    j["num_states"] = S;
    j["num_actions"] = A;
    j["horizon"] = H;
    j["start_dist"] = mdp.start_dist();
    j["reward"] = to_json(mdp.true_reward());
    Json trans = Json::array();
    for (int h = 0; h < H; ++h) {
        Json per_h = Json::array();
        for (int s = 0; s < S; ++s) {
            Json per_s = Json::array();
            for (int a = 0; a < A; ++a) {
                const double* row = mdp.transition_row(h, s, a);
                per_s.push_back(Json(std::vector<double>(row, row + S)));
            }
            per_h.push_back(std::move(per_s));
        }
        trans.push_back(std::move(per_h));
    }
    j["transitions"] = std::move(trans);
    return j;
}

TabularMdp mdp_from_json(const Json& j) {
    const int S = j.at("num_states").get<int>();
    const int A = j.at("num_actions").get<int>();
    const int H = j.at("horizon").get<int>();
    std::vector<double> mu = j.at("start_dist").get<std::vector<double>>();
    RewardTable reward = reward_from_json(j.at("reward"));
    const bool homogeneous = j.value("time_homogeneous", false);
    const Json& trans = j.at("transitions");

    const auto read_kernel = [&](const Json& block) {
        std::vector<double> kernel;
        kernel.reserve(static_cast<std::size_t>(S) * A * S);
        if (static_cast<int>(block.size()) != S) throw ConfigError("mdp json: kernel shape");
        for (const auto& per_s : block) {
            if (static_cast<int>(per_s.size()) != A) throw ConfigError("mdp json: kernel shape");
            for (const auto& row : per_s) {
                if (static_cast<int>(row.size()) != S) throw ConfigError("mdp json: kernel shape");
                for (const auto& v : row) kernel.push_back(v.get<double>());
            }
        }
        return kernel;
    };

    if (homogeneous)
        return TabularMdp::time_homogeneous(S, A, H, read_kernel(trans), std::move(reward),
                                            std::move(mu));

    if (static_cast<int>(trans.size()) != H) throw ConfigError("mdp json: horizon shape");
    std::vector<double> full;
    full.reserve(static_cast<std::size_t>(H) * S * A * S);
    for (const auto& block : trans) {
        const auto kernel = read_kernel(block);
        full.insert(full.end(), kernel.begin(), kernel.end());
    }
    return TabularMdp(S, A, H, std::move(full), std::move(reward), std::move(mu));
}

Json to_json(const NonstationaryPolicy& policy) {
    Json probs = Json::array();
    for (int h = 0; h < policy.horizon; ++h)
        probs.push_back(grid2(std::vector<double>(policy.row(h, 0),
                                                  policy.row(h, 0) +
                                                      static_cast<std::size_t>(policy.num_states) *
                                                          policy.num_actions),
                              policy.num_states, policy.num_actions));
    Json j;
    j["horizon"] = policy.horizon;
    j["num_states"] = policy.num_states;
    j["num_actions"] = policy.num_actions;
    j["action_probs"] = std::move(probs);
    return j;
}

NonstationaryPolicy policy_from_json(const Json& j) {
    NonstationaryPolicy p(j.at("horizon").get<int>(), j.at("num_states").get<int>(),
                          j.at("num_actions").get<int>());
    const Json& probs = j.at("action_probs");
    if (static_cast<int>(probs.size()) != p.horizon)
        throw ConfigError("policy json: horizon shape");
    for (int h = 0; h < p.horizon; ++h) {
        int rows = 0, cols = 0;
        const auto flat = flat2(probs[static_cast<std::size_t>(h)], &rows, &cols);
        if (rows != p.num_states || cols != p.num_actions)
            throw ConfigError("policy json: table shape");
        std::copy(flat.begin(), flat.end(), p.row(h, 0));
    }
    p.validate();
    return p;
}

Json to_json(const PolicyClass& pc) {
    Json j;
    if (pc.is_masked()) {
        j["kind"] = "masked";
        j["num_states"] = pc.num_states;
        j["num_actions"] = pc.num_actions;
        Json mask = Json::array();
        for (int s = 0; s < pc.num_states; ++s) {
            Json row = Json::array();
            for (int a = 0; a < pc.num_actions; ++a) row.push_back(pc.action_allowed(s, a));
            mask.push_back(std::move(row));
        }
        j["allowed"] = std::move(mask);
    } else {
        j["kind"] = "explicit";
        Json members = Json::array();
        for (const auto& m : pc.members) members.push_back(to_json(m));
        j["members"] = std::move(members);
    }
    return j;
}

PolicyClass policy_class_from_json(const Json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "masked") {
        const int S = j.at("num_states").get<int>();
        const int A = j.at("num_actions").get<int>();
        const Json& mask = j.at("allowed");
        if (static_cast<int>(mask.size()) != S) throw ConfigError("class json: mask shape");
        std::vector<std::uint8_t> allowed(static_cast<std::size_t>(S) * A, 0);
        for (int s = 0; s < S; ++s) {
            if (static_cast<int>(mask[static_cast<std::size_t>(s)].size()) != A)
                throw ConfigError("class json: mask shape");
            for (int a = 0; a < A; ++a)
                allowed[static_cast<std::size_t>(s) * A + a] =
                    mask[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)].get<bool>() ? 1
                                                                                               : 0;
        }
        return PolicyClass::masked(S, A, std::move(allowed));
    }
    if (kind == "explicit") {
        std::vector<NonstationaryPolicy> members;
        for (const auto& m : j.at("members")) members.push_back(policy_from_json(m));
        return PolicyClass::explicit_list(std::move(members));
    }
    throw ConfigError("class json: unknown kind " + kind);
}

Json to_json(const RewardClass& rc) {
    Json bases = Json::array();
    for (const auto& r : rc.base_rewards) bases.push_back(to_json(r));
    Json j;
    j["base_rewards"] = std::move(bases);
    j["rstar_index"] = rc.rstar_index;
    return j;
}

RewardClass reward_class_from_json(const Json& j) {
    RewardClass rc;
    for (const auto& r : j.at("base_rewards")) rc.base_rewards.push_back(reward_from_json(r));
    rc.rstar_index = j.value("rstar_index", -1);
    rc.validate();
    return rc;
}

Json to_json(const ResetDistribution& rho) {
    Json j;
    j["horizon"] = rho.horizon;
    j["num_states"] = rho.num_states;
    j["per_step"] = grid2(rho.per_step, rho.horizon, rho.num_states);
    return j;
}

ResetDistribution reset_distribution_from_json(const Json& j) {
    ResetDistribution rho;
    rho.horizon = j.at("horizon").get<int>();
    rho.num_states = j.at("num_states").get<int>();
    int rows = 0, cols = 0;
    rho.per_step = flat2(j.at("per_step"), &rows, &cols);
    if (rows != rho.horizon || cols != rho.num_states)
        throw ConfigError("reset json: table shape");
    rho.validate();
    return rho;
}

Json to_json(const DemoDataset& demos) {
    Json recs = Json::array();
    for (const auto& r : demos.records) recs.push_back(Json::array({r.h, r.s, r.a}));
    Json j;
    j["horizon"] = demos.horizon;
    j["num_states"] = demos.num_states;
    j["num_actions"] = demos.num_actions;
    j["source"] = demos.source;
    j["records"] = std::move(recs);
    j["traj_offsets"] = demos.traj_offsets;
    j["traj_lengths"] = demos.traj_lengths;
    return j;
}

DemoDataset demos_from_json(const Json& j) {
    DemoDataset d;
    d.horizon = j.at("horizon").get<int>();
    d.num_states = j.at("num_states").get<int>();
    d.num_actions = j.at("num_actions").get<int>();
    d.source = j.value("source", "");
    for (const auto& r : j.at("records"))
        d.records.push_back({r[0].get<int>(), r[1].get<int>(), r[2].get<int>()});
    d.traj_offsets = j.value("traj_offsets", std::vector<std::size_t>{});
    d.traj_lengths = j.value("traj_lengths", std::vector<int>{});
    d.per_h_counts.assign(static_cast<std::size_t>(d.horizon), 0);
    for (const auto& r : d.records) ++d.per_h_counts[static_cast<std::size_t>(r.h - 1)];
    d.validate();
    return d;
}

Json to_json(const CompletenessReport& report) {
    Json j;
    j["epsilon_pi"] = report.epsilon_pi;
    j["lower_bound_only"] = report.lower_bound_only;
    j["evaluations"] = report.evaluations;
    j["worst_pair"] = {{"policy_index", report.worst_policy_index},
                       {"reward_index", report.worst_reward_index}};
    j["worst_policy"] = to_json(report.worst_policy);
    if (report.pair_rows > 0) {
        j["per_pair_errors"] =
            grid2(report.per_pair_errors, static_cast<int>(report.pair_rows), report.pair_cols);
    } else {
        j["per_pair_errors"] = nullptr;
    }
    return j;
}

std::string config_hash(const Json& j) {
    const std::uint64_t h = rng::fnv1a64(j.dump());
    std::ostringstream out;
    out << std::hex;
    out.width(16);
    out.fill('0');
    out << h;
    return out.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot open for writing: " + path);
    out << text;
    if (!out) throw ConfigError("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace irlab
