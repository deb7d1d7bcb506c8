#include "irlab/stile.hpp"

#include <limits>

#include "irlab/kernels.hpp"

namespace irlab {

WitnessFunction witness(const OccupancyTensor& occ_a, const OccupancyTensor& occ_b) {
    if (occ_a.num_states != occ_b.num_states || occ_a.num_actions != occ_b.num_actions)
        throw ConfigError("witness: occupancy dimensions differ");
    WitnessFunction f;
    f.num_states = occ_a.num_states;
    f.num_actions = occ_a.num_actions;
    f.values.resize(occ_a.averaged.size());
    for (std::size_t i = 0; i < f.values.size(); ++i)
        f.values[i] = occ_a.averaged[i] >= occ_b.averaged[i] ? 1.0 : -1.0;  // sign(0) = +1
    return f;
}

StileResult stile_select(const TabularMdp& mdp, const std::vector<NonstationaryPolicy>& policies,
                         const DemoDataset& expert_demos, bool store_matrix) {
    if (policies.empty()) throw ConfigError("stile: empty policy list");
    StileResult result;
    if (policies.size() == 1) {
        result.selected_index = 0;
        result.scores.assign(1, 0.0);
        return result;
    }
    expert_demos.validate();
    if (expert_demos.records.empty()) throw ConfigError("stile: empty expert demos");
    if (expert_demos.num_states != mdp.num_states() ||
        expert_demos.num_actions != mdp.num_actions())
        throw ConfigError("stile: demo dimensions do not match mdp");

    const std::size_t P = policies.size();
    std::vector<OccupancyTensor> occ;
    occ.reserve(P);
    for (const auto& pi : policies) occ.push_back(compute_occupancy(mdp, pi));

    std::vector<WitnessFunction> witnesses;
    witnesses.reserve(P * (P - 1));
    for (std::size_t i = 0; i < P; ++i)
        for (std::size_t j = 0; j < P; ++j) {
            if (i == j) continue;
            WitnessFunction f = witness(occ[i], occ[j]);
            f.pi_index = static_cast<int>(i);
            f.pi_prime_index = static_cast<int>(j);
            witnesses.push_back(std::move(f));
        }
    result.num_witnesses = witnesses.size();

    const std::vector<double> sample_freq = expert_demos.pooled_frequencies();
    std::vector<double> sample_means(witnesses.size());
    for (std::size_t w = 0; w < witnesses.size(); ++w)
        sample_means[w] = kernels::dot(sample_freq.data(), witnesses[w].values.data(),
                                       sample_freq.size());

    if (store_matrix) {
        result.score_matrix.assign(P * witnesses.size(), 0.0);
        result.matrix_stored = true;
    }
    result.scores.assign(P, 0.0);
    int best = 0;
    double best_score = std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < P; ++p) {
        double score = -std::numeric_limits<double>::infinity();
        for (std::size_t w = 0; w < witnesses.size(); ++w) {
            const double val = kernels::dot(occ[p].averaged.data(), witnesses[w].values.data(),
                                            occ[p].averaged.size()) -
                               sample_means[w];
            if (store_matrix) result.score_matrix[p * witnesses.size() + w] = val;
            score = std::max(score, val);
        }
        result.scores[p] = score;
        if (score < best_score) {
            best_score = score;
            best = static_cast<int>(p);
        }
    }
    result.selected_index = best;
    return result;
}

}  // namespace irlab
