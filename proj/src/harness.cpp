#include "irlab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <future>
#include <memory>
#include <sstream>
#include <thread>

#include "irlab/kernels.hpp"
#include "irlab/rng.hpp"
#include "irlab/stile.hpp"

namespace irlab {

DemoDataset sample_demos(const TabularMdp& mdp, const NonstationaryPolicy& policy, int num_pairs,
                         double tremble, std::uint64_t seed,
                         const std::vector<int>& terminal_states, const std::string& source) {
    detail::check_policy_dims(mdp, policy);
    if (num_pairs < 1) throw ConfigError("sample_demos: need at least one pair");
    if (tremble < 0.0 || tremble > 1.0) throw ConfigError("sample_demos: tremble outside [0,1]");

    const int S = mdp.num_states(), A = mdp.num_actions(), H = mdp.horizon();
    std::vector<std::uint8_t> terminal(static_cast<std::size_t>(S), 0);
    for (int t : terminal_states) terminal[static_cast<std::size_t>(t)] = 1;

    rng::SplitMix64 gen = rng::stream(seed, "sample-demos");

    DemoDataset demos;
    demos.horizon = H;
    demos.num_states = S;
    demos.num_actions = A;
    demos.source = source;
    demos.per_h_counts.assign(static_cast<std::size_t>(H), 0);
    demos.traj_offsets.push_back(0);

    while (demos.records.size() < static_cast<std::size_t>(num_pairs)) {
        int s = rng::sample_categorical(gen, mdp.start_dist().data(), S);
        int length = H;
        bool terminal_seen = false;
        int steps = 0;
        for (int h = 0; h < H && demos.records.size() < static_cast<std::size_t>(num_pairs); ++h) {
            if (!terminal_seen && terminal[static_cast<std::size_t>(s)]) {
                terminal_seen = true;
                length = h;
            }
            int a;
            if (tremble > 0.0 && gen.next_double() < tremble)
                a = rng::uniform_int(gen, A);
            else
                a = rng::sample_categorical(gen, policy.row(h, s), A);
            demos.records.push_back({h + 1, s, a});
            ++demos.per_h_counts[static_cast<std::size_t>(h)];
            ++steps;
            if (h + 1 < H) s = rng::sample_categorical(gen, mdp.transition_row(h, s, a), S);
        }
        demos.traj_offsets.push_back(demos.records.size());
        demos.traj_lengths.push_back(terminal_seen ? length : steps);
    }
    demos.validate();
    return demos;
}

ResetSpec ResetSpec::parse(const std::string& text) {
    ResetSpec spec;
    std::vector<std::string> parts;
    std::string cur;
    for (char c : text) {
        if (c == ':') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    parts.push_back(cur);

    spec.kind = parts[0];
    if (spec.kind == "occupancy") {
        if (parts.size() < 2) throw ConfigError("reset spec: occupancy needs a policy");
        spec.policy = parts[1];
    } else if (spec.kind == "demo_subset") {
        if (parts.size() < 3) throw ConfigError("reset spec: demo_subset needs filter:threshold");
        spec.filter = parts[1];
        spec.threshold = std::stoi(parts[2]);
    } else if (spec.kind != "start_state" && spec.kind != "expert_demos" &&
               spec.kind != "offline_demos" && spec.kind != "mixture") {
        throw ConfigError("reset spec: unknown kind " + spec.kind);
    }
    return spec;
}

std::string ResetSpec::text() const {
    if (kind == "occupancy") return kind + ":" + policy;
    if (kind == "demo_subset") return kind + ":" + filter + ":" + std::to_string(threshold);
    return kind;
}

ResetDistribution resolve_reset(const ResetSpec& spec, const Scenario& scenario,
                                const DemoDataset* expert_demos,
                                const DemoDataset* offline_demos) {
    const TabularMdp& mdp = scenario.mdp;
    if (spec.kind == "start_state") return reset_from_start(mdp);
    if (spec.kind == "expert_demos") {
        if (expert_demos != nullptr) return reset_from_demos(*expert_demos, mdp);
        return reset_from_occupancy(compute_occupancy(mdp, scenario.expert));
    }
    if (spec.kind == "offline_demos") {
        if (offline_demos != nullptr) return reset_from_demos(*offline_demos, mdp);
        if (!scenario.offline_policy)
            throw ConfigError("reset: scenario has no offline policy");
        return reset_from_occupancy(compute_occupancy(mdp, *scenario.offline_policy));
    }
    if (spec.kind == "mixture") {
        if (expert_demos == nullptr || offline_demos == nullptr)
            throw ConfigError("reset: mixture needs both demo datasets");
        return reset_from_mixture(*expert_demos, *offline_demos, mdp);
    }
    if (spec.kind == "occupancy") {
        if (spec.policy == "expert")
            return reset_from_occupancy(compute_occupancy(mdp, scenario.expert));
        if (spec.policy == "offline") {
            if (!scenario.offline_policy)
                throw ConfigError("reset: scenario has no offline policy");
            return reset_from_occupancy(compute_occupancy(mdp, *scenario.offline_policy));
        }
        if (spec.policy == "pistar") {
            const PiStarResult pistar = best_realizable_policy(
                mdp, scenario.policy_class, scenario.reward_class, scenario.expert);
            return reset_from_occupancy(compute_occupancy(mdp, pistar.policy));
        }
        throw ConfigError("reset: unknown occupancy source " + spec.policy);
    }
    if (spec.kind == "demo_subset") {
        if (expert_demos == nullptr) throw ConfigError("reset: demo_subset needs expert demos");
        const int threshold = spec.threshold;
        if (spec.filter == "short")
            return reset_from_demo_subset(*expert_demos, mdp,
                                          [threshold](int len) { return len < threshold; });
        if (spec.filter == "long")
            return reset_from_demo_subset(*expert_demos, mdp,
                                          [threshold](int len) { return len >= threshold; });
        throw ConfigError("reset: unknown demo_subset filter " + spec.filter);
    }
    throw ConfigError("reset: unknown kind " + spec.kind);
}

Json to_json(const ExperimentConfig& config) {
    Json j;
    j["scenario"] = config.scenario;
    j["algorithm"] = config.algorithm;
    j["reset"] = config.reset.text();
    j["iterations"] = config.iterations;
    j["num_expert_pairs"] = config.num_expert_pairs;
    j["num_offline_pairs"] = config.num_offline_pairs;
    j["num_validation_pairs"] = config.num_validation_pairs;
    j["tremble"] = config.tremble;
    j["seeds"] = config.seeds;
    j["mode"] = config.mode;
    j["epsilon"] = config.epsilon;
    j["learning_rate"] = config.learning_rate;
    j["compute_completeness"] = config.compute_completeness;
    j["output_dir"] = config.output_dir;
    return j;
}

ExperimentConfig experiment_config_from_json(const Json& j) {
    ExperimentConfig c;
    c.scenario = j.at("scenario").get<std::string>();
    c.algorithm = j.value("algorithm", std::string("GUITAR"));
    if (j.contains("reset")) {
        if (j["reset"].is_string())
            c.reset = ResetSpec::parse(j["reset"].get<std::string>());
        else {
            c.reset.kind = j["reset"].value("kind", std::string("expert_demos"));
            c.reset.policy = j["reset"].value("policy", std::string("pistar"));
            c.reset.filter = j["reset"].value("filter", std::string("short"));
            c.reset.threshold = j["reset"].value("threshold", 0);
        }
    }
    c.iterations = j.value("iterations", 32);
    c.num_expert_pairs = j.value("num_expert_pairs", 200);
    c.num_offline_pairs = j.value("num_offline_pairs", 0);
    c.num_validation_pairs = j.value("num_validation_pairs", 50);
    c.tremble = j.value("tremble", 0.0);
    c.seeds = j.value("seeds", std::vector<std::uint64_t>{1});
    c.mode = j.value("mode", std::string("finite_sample"));
    c.epsilon = j.value("epsilon", 0.0);
    c.learning_rate = j.value("learning_rate", 0.0);
    c.compute_completeness = j.value("compute_completeness", true);
    c.output_dir = j.value("output_dir", std::string());
    if (c.tremble < 0.0 || c.tremble > 1.0) throw ConfigError("config: tremble outside [0,1]");
    if (c.num_expert_pairs < 1) throw ConfigError("config: num_expert_pairs must be >= 1");
    if (c.seeds.empty()) throw ConfigError("config: seed list is empty");
    return c;
}

std::string default_output_dir() {
    if (const char* env = std::getenv("IRLAB_OUT")) return env;
    return ".";
}

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::uint64_t derive_seed(const ExperimentConfig& config, std::uint64_t seed,
                          const std::string& purpose) {
    // Keyed by (scenario, seed, purpose) only: every algorithm sees the same
    // datasets for a given seed.
    return seed ^ rng::fnv1a64(config.scenario + "/" + purpose);
}

struct SeedRun {
    Json result;
    std::string csv;  // empty for non-iterative algorithms
    SeedOutcome outcome;
};

SeedRun run_one_seed(const ExperimentConfig& config, const Scenario& scenario,
                     std::uint64_t seed, const std::string& hash) {
    const TabularMdp& mdp = scenario.mdp;
    const RewardTable& rstar = scenario.reward_class.rstar();
    const bool exact_mode = config.mode == "exact_expert";

    DemoDataset expert_demos =
        sample_demos(mdp, scenario.expert, config.num_expert_pairs, 0.0,
                     derive_seed(config, seed, "expert-demos"), scenario.terminal_states, "expert");
    std::unique_ptr<DemoDataset> offline_demos;
    if (config.num_offline_pairs > 0) {
        if (!scenario.offline_policy)
            throw ConfigError("experiment: offline pairs requested but scenario has no offline "
                              "policy");
        offline_demos = std::make_unique<DemoDataset>(
            sample_demos(mdp, *scenario.offline_policy, config.num_offline_pairs, config.tremble,
                         derive_seed(config, seed, "offline-demos"), scenario.terminal_states,
                         "offline"));
    }
    std::unique_ptr<DemoDataset> validation_demos;
    if (!exact_mode && config.num_validation_pairs > 0)
        validation_demos = std::make_unique<DemoDataset>(sample_demos(
            mdp, scenario.expert, config.num_validation_pairs, 0.0,
            derive_seed(config, seed, "validation-demos"), scenario.terminal_states, "expert"));

    const double expert_value = policy_value(mdp, scenario.expert, rstar);

    Json result;
    result["config_hash"] = hash;
    result["scenario"] = scenario.id;
    result["algorithm"] = config.algorithm;
    result["seed"] = seed;
    result["rng"] = rng::kAlgorithmId;
    result["mode"] = config.mode;
    result["expert_value"] = expert_value;
    result["horizon"] = mdp.horizon();
    result["num_expert_pairs"] = config.num_expert_pairs;
    result["num_offline_pairs"] = config.num_offline_pairs;

    SeedRun out;
    out.outcome.seed = seed;

    const auto finish_policy_only = [&](const NonstationaryPolicy& learned,
                                        const std::string& reset_text) {
        const double gap = expert_value - policy_value(mdp, learned, rstar);
        result["reset"] = reset_text;
        result["final_gap"] = gap;
        result["selected_gap"] = gap;
        result["mixture_gap"] = gap;
        result["trace"] = nullptr;
        result["policy"] = to_json(learned);
        out.outcome.final_gap = gap;
        out.outcome.selected_gap = gap;
        out.outcome.mixture_gap = gap;
    };

    if (config.algorithm == "BC" || config.algorithm == "BC_mixed") {
        DemoDataset training = expert_demos;
        if (config.algorithm == "BC_mixed" && offline_demos != nullptr)
            training.append(*offline_demos);
        finish_policy_only(behavioral_cloning(training, scenario.policy_class), "-");
    } else if (config.algorithm == "STILE") {
        std::vector<NonstationaryPolicy> list;
        if (scenario.policy_class.is_masked())
            list = enumerate_members(scenario.policy_class, mdp.horizon(), 4096);
        else
            list = scenario.policy_class.members;
        const StileResult sel = stile_select(mdp, list, expert_demos);
        result["stile_selected_index"] = sel.selected_index;
        finish_policy_only(list[static_cast<std::size_t>(sel.selected_index)], "-");
    } else if (config.algorithm == "MM" || config.algorithm == "FILTER" ||
               config.algorithm == "GUITAR") {
        ResetSpec spec = config.reset;
        if (config.algorithm == "MM") spec = ResetSpec::parse("start_state");
        if (config.algorithm == "FILTER") spec = ResetSpec::parse("expert_demos");
        const DemoDataset* demo_ptr = exact_mode ? nullptr : &expert_demos;
        const DemoDataset* offline_ptr = exact_mode ? nullptr : offline_demos.get();
        ResetDistribution reset = resolve_reset(spec, scenario, demo_ptr, offline_ptr);

        GuitarInputs inputs;
        inputs.mdp = &mdp;
        inputs.policy_class = &scenario.policy_class;
        inputs.reward_class = &scenario.reward_class;
        inputs.expert = &scenario.expert;
        inputs.expert_demos = exact_mode ? nullptr : &expert_demos;
        inputs.validation_demos = validation_demos.get();
        inputs.config.iterations = config.iterations;
        inputs.config.mode = exact_mode ? LossMode::exact_expert : LossMode::finite_sample;
        inputs.config.reset = reset;
        inputs.config.psdp_epsilon = config.epsilon;
        inputs.config.psdp_slack = config.epsilon > 0.0
                                       ? PsdpSlackRule::adversarial_within_epsilon
                                       : PsdpSlackRule::exact;
        inputs.config.learning_rate = config.learning_rate;

        const GuitarRunResult run = guitar_run(inputs);

        result["reset"] = spec.text();
        result["learning_rate"] = run.learning_rate;
        result["selected_index"] = run.selected_index;
        result["selected_gap"] = run.selected_gap;
        result["final_gap"] = run.trace.back().gap;
        result["mixture_gap"] = run.mixture_gap;
        result["selected_policy"] = to_json(run.policies[static_cast<std::size_t>(run.selected_index)]);
        Json trace = Json::array();
        for (const auto& row : run.trace) {
            Json r;
            r["loss"] = row.loss;
            r["J_pi_rstar"] = row.value_rstar;
            r["gap"] = row.gap;
            r["regret_avg"] = row.regret_avg;
            r["reward_weights"] = row.reward_weights;
            trace.push_back(std::move(r));
        }
        result["trace"] = std::move(trace);

        Json bound;
        bound["epsilon"] = config.epsilon;
        bound["num_base_rewards"] = scenario.reward_class.size();
        if (config.compute_completeness) {
            CompletenessOptions opts;
            opts.max_evaluations = 60'000;
            opts.sample_count = 1024;
            opts.sample_seed = derive_seed(config, seed, "completeness");
            const CompletenessReport report = reward_agnostic_completeness(
                mdp, scenario.policy_class, scenario.reward_class, reset, opts);
            bound["epsilon_pi"] = report.epsilon_pi;
            bound["epsilon_pi_lower_bound_only"] = report.lower_bound_only;
        }
        result["bound"] = std::move(bound);

        std::ostringstream csv;
        csv << "iter,J_pi_rstar,gap,regret_avg,loss\n";
        for (std::size_t i = 0; i < run.trace.size(); ++i) {
            const auto& row = run.trace[i];
            csv << (i + 1) << ',' << fmt_double(row.value_rstar) << ',' << fmt_double(row.gap)
                << ',' << fmt_double(row.regret_avg) << ',' << fmt_double(row.loss) << '\n';
        }
        out.csv = csv.str();

        out.outcome.final_gap = run.trace.back().gap;
        out.outcome.selected_gap = run.selected_gap;
        out.outcome.mixture_gap = run.mixture_gap;
    } else {
        throw ConfigError("experiment: unknown algorithm " + config.algorithm);
    }

    out.result = std::move(result);
    return out;
}

}  // namespace

ExperimentSummary run_experiment(const ExperimentConfig& config) {
    const Scenario scenario = build_scenario(config.scenario);
    scenario.validate();

    Json config_json = to_json(config);
    const std::string hash = config_hash(config_json);

    std::string out_dir = config.output_dir.empty() ? default_output_dir() : config.output_dir;
    std::filesystem::create_directories(out_dir);

    const auto base_name = [&](std::uint64_t seed) {
        return out_dir + "/" + config.scenario + "__" + config.algorithm + "__seed" +
               std::to_string(seed);
    };

    const std::size_t n_seeds = config.seeds.size();
    std::vector<SeedRun> runs(n_seeds);
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t workers = std::min<std::size_t>(n_seeds, hw);
    std::vector<std::future<void>> futures;
    for (std::size_t w = 0; w < workers; ++w) {
        futures.push_back(std::async(std::launch::async, [&, w]() {
            for (std::size_t i = w; i < n_seeds; i += workers)
                runs[i] = run_one_seed(config, scenario, config.seeds[i], hash);
        }));
    }
    for (auto& f : futures) f.get();

    ExperimentSummary summary;
    summary.config_hash = hash;
    Json manifest;
    manifest["config"] = std::move(config_json);
    manifest["config_hash"] = hash;
    manifest["rng"] = rng::kAlgorithmId;
    Json files = Json::array();
    for (std::size_t i = 0; i < n_seeds; ++i) {
        SeedRun& run = runs[i];
        const std::string base = base_name(config.seeds[i]);
        run.outcome.result_path = base + ".json";
        write_text_file(run.outcome.result_path, run.result.dump(2) + "\n");
        files.push_back(run.outcome.result_path);
        if (!run.csv.empty()) {
            run.outcome.trace_path = base + ".csv";
            write_text_file(run.outcome.trace_path, run.csv);
            files.push_back(run.outcome.trace_path);
        }
        summary.outcomes.push_back(run.outcome);
    }
    manifest["results"] = std::move(files);
    Json gaps = Json::array();
    for (const auto& o : summary.outcomes)
        gaps.push_back({{"seed", o.seed},
                        {"final_gap", o.final_gap},
                        {"selected_gap", o.selected_gap},
                        {"mixture_gap", o.mixture_gap}});
    manifest["summary"] = std::move(gaps);

    summary.manifest_path = out_dir + "/manifest__" + config.scenario + "__" + config.algorithm +
                            "__" + hash + ".json";
    write_text_file(summary.manifest_path, manifest.dump(2) + "\n");
    return summary;
}

double interquartile_mean(std::vector<double> values) {
    if (values.empty()) throw ConfigError("iqm: empty input");
    std::sort(values.begin(), values.end());
    const std::size_t trim = values.size() / 4;
    double total = 0.0;
    std::size_t count = 0;
    for (std::size_t i = trim; i + trim < values.size(); ++i) {
        total += values[i];
        ++count;
    }
    return total / static_cast<double>(count);
}

}  // namespace irlab
