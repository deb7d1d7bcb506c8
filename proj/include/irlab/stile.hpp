#pragma once

#include <vector>

#include "irlab/guitar.hpp"
#include "irlab/mdp.hpp"

// Tournament selection over an explicit policy list: for every ordered pair
// of distinct policies a sign witness certifies their occupancy L1 distance,
// and the selected policy minimizes the worst witness discrepancy against the
// pooled expert sample.  Quadratic in the list size on purpose; the list is
// the policy class.

namespace irlab {

struct WitnessFunction {
    int num_states = 0;
    int num_actions = 0;
    std::vector<double> values;  // entries in {-1, +1}
    int pi_index = -1;            // generating pair, when known
    int pi_prime_index = -1;

    double at(int s, int a) const {
        return values[static_cast<std::size_t>(s) * num_actions + a];
    }
};

// f = sign(d^a - d^b) on averaged occupancies, sign(0) = +1.  Attains
//   E_{d^a} f - E_{d^b} f = || d^a - d^b ||_1
// exactly, the maximum over all |f|_inf <= 1.
WitnessFunction witness(const OccupancyTensor& occ_a, const OccupancyTensor& occ_b);

struct StileResult {
    int selected_index = 0;
    std::vector<double> scores;        // per policy: max_f (E_{d^pi} f - sample mean of f)
    std::size_t num_witnesses = 0;     // |F| = |Pi| * (|Pi| - 1)
    std::vector<double> score_matrix;  // [policies][witnesses] when requested
    bool matrix_stored = false;
};

// Occupancies are computed exactly from the known dynamics; expert samples
// are pooled across timesteps to match the averaged occupancy.  Ties break to
// the lowest list index.  A single-policy list returns that policy; an empty
// list is an error.
StileResult stile_select(const TabularMdp& mdp, const std::vector<NonstationaryPolicy>& policies,
                         const DemoDataset& expert_demos, bool store_matrix = false);

}  // namespace irlab
