#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "irlab/guitar.hpp"
#include "irlab/scenarios.hpp"
#include "irlab/serialize.hpp"

// Experiment orchestration: dataset sampling, algorithm dispatch over
// scenarios x reset distributions x seeds, persisted JSON/CSV results with a
// manifest, and plot-data emission.  (config, seed) fully determines every
// output byte; all algorithms within one experiment consume identical demo
// datasets per seed.

namespace irlab {

// Rolls trajectories under `policy`, replacing each step's action with a
// uniform draw with probability `tremble`, until num_pairs (h, s, a) records
// are collected (the last trajectory may be truncated).  Trajectory lengths
// count the steps before the first visit to a terminal state.
DemoDataset sample_demos(const TabularMdp& mdp, const NonstationaryPolicy& policy, int num_pairs,
                         double tremble, std::uint64_t seed,
                         const std::vector<int>& terminal_states = {},
                         const std::string& source = "expert");

struct ResetSpec {
    // start_state | expert_demos | offline_demos | mixture | occupancy | demo_subset
    std::string kind = "expert_demos";
    std::string policy = "pistar";  // occupancy source: expert | offline | pistar
    std::string filter = "short";   // demo_subset: short (< threshold) | long (>= threshold)
    int threshold = 0;

    // Compact text form, e.g. "occupancy:pistar", "demo_subset:short:6".
    static ResetSpec parse(const std::string& text);
    std::string text() const;
};

// Resolves a spec against a scenario and the per-seed datasets.  Demo-backed
// kinds need the corresponding dataset; occupancy kinds compute exact
// marginals (pistar runs the realizable-optimum solver).
ResetDistribution resolve_reset(const ResetSpec& spec, const Scenario& scenario,
                                const DemoDataset* expert_demos,
                                const DemoDataset* offline_demos);

struct ExperimentConfig {
    std::string scenario;
    std::string algorithm = "GUITAR";  // BC | BC_mixed | MM | FILTER | GUITAR | STILE
    ResetSpec reset;                   // GUITAR only; MM and FILTER pin their resets
    int iterations = 32;
    int num_expert_pairs = 200;
    int num_offline_pairs = 0;
    int num_validation_pairs = 50;
    double tremble = 0.0;  // offline-data generation
    std::vector<std::uint64_t> seeds = {1};
    std::string mode = "finite_sample";  // finite_sample | exact_expert
    double epsilon = 0.0;                // PSDP slack (adversarial selection when > 0)
    double learning_rate = 0.0;          // 0 = regret-bound default
    bool compute_completeness = true;    // record a (possibly lower-bound) epsilon_pi
    std::string output_dir;              // falls back to $IRLAB_OUT, then "."
};

Json to_json(const ExperimentConfig& config);
ExperimentConfig experiment_config_from_json(const Json& j);

struct SeedOutcome {
    std::uint64_t seed = 0;
    double final_gap = 0.0;     // last-iterate gap (BC/STILE: the learned policy's gap)
    double selected_gap = 0.0;  // validation-selected iterate (iterative algorithms)
    double mixture_gap = 0.0;
    std::string result_path;
    std::string trace_path;  // empty for non-iterative algorithms
};

struct ExperimentSummary {
    std::string manifest_path;
    std::string config_hash;
    std::vector<SeedOutcome> outcomes;
};

ExperimentSummary run_experiment(const ExperimentConfig& config);

// ---- plot-data emission ----

struct PlotRequest {
    std::string kind;  // gap_curve | bound_decomposition | coverage_table | completeness_heatmap
    std::vector<std::string> inputs;  // result JSONs (heatmap: a completeness report JSON)
    std::string output_prefix;
    bool iqm = false;  // add an inter-quartile-mean column to gap_curve
};

// Returns the written file paths (CSV always; SVG for curve/heatmap kinds).
std::vector<std::string> emit_plot_data(const PlotRequest& request);

// Mean of the values between the 25th and 75th percentile (inclusive trim).
double interquartile_mean(std::vector<double> values);

std::string default_output_dir();

}  // namespace irlab
