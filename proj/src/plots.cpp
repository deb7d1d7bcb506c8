#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>

#include "irlab/harness.hpp"

// Plot-data emission: CSV is the canonical output; line charts and heatmaps
// also get a small self-contained SVG.

namespace irlab {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_short(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

double sample_stderr(const std::vector<double>& values) {
    const std::size_t n = values.size();
    if (n < 2) return 0.0;
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / static_cast<double>(n - 1)) / std::sqrt(static_cast<double>(n));
}

double mean_of(const std::vector<double>& values) {
    double total = 0.0;
    for (double v : values) total += v;
    return total / static_cast<double>(values.size());
}

struct Series {
    std::string label;
    std::vector<double> y;  // indexed by iteration
};

// Minimal line chart: fixed frame, per-series polyline, legend text.
std::string svg_line_chart(const std::string& title, const std::vector<Series>& series) {
    const double width = 640, height = 420, ml = 70, mr = 20, mt = 40, mb = 50;
    double y_min = 0.0, y_max = 1e-12;
    std::size_t n = 0;
    for (const auto& s : series) {
        n = std::max(n, s.y.size());
        for (double v : s.y) {
            if (std::isfinite(v)) {
                y_min = std::min(y_min, v);
                y_max = std::max(y_max, v);
            }
        }
    }
    if (n < 1) n = 1;
    const double span = y_max - y_min > 0 ? y_max - y_min : 1.0;
    const auto x_of = [&](std::size_t i) {
        return ml + (width - ml - mr) * (n > 1 ? static_cast<double>(i) / (n - 1) : 0.5);
    };
    const auto y_of = [&](double v) { return height - mb - (height - mt - mb) * (v - y_min) / span; };

    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
    std::ostringstream svg;
    svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='" << height
        << "' viewBox='0 0 " << width << " " << height << "'>\n";
    svg << "<rect width='100%' height='100%' fill='white'/>\n";
    svg << "<text x='" << width / 2 << "' y='24' text-anchor='middle' font-size='16'>" << title
        << "</text>\n";
    svg << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='" << height - mb
        << "' stroke='black'/>\n";
    svg << "<line x1='" << ml << "' y1='" << height - mb << "' x2='" << width - mr << "' y2='"
        << height - mb << "' stroke='black'/>\n";
    for (int t = 0; t <= 4; ++t) {
        const double v = y_min + span * t / 4.0;
        svg << "<text x='" << ml - 6 << "' y='" << y_of(v) + 4
            << "' text-anchor='end' font-size='11'>" << fmt_short(v) << "</text>\n";
    }
    svg << "<text x='" << (ml + width - mr) / 2 << "' y='" << height - 14
        << "' text-anchor='middle' font-size='12'>iteration</text>\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        const char* color = colors[k % 5];
        svg << "<polyline fill='none' stroke='" << color << "' stroke-width='1.5' points='";
        for (std::size_t i = 0; i < series[k].y.size(); ++i) {
            if (!std::isfinite(series[k].y[i])) continue;
            svg << x_of(i) << "," << y_of(series[k].y[i]) << " ";
        }
        svg << "'/>\n";
        svg << "<text x='" << width - mr - 150 << "' y='" << mt + 16 * (k + 1)
            << "' font-size='12' fill='" << color << "'>" << series[k].label << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

std::string svg_heatmap(const std::string& title, const std::vector<double>& table,
                        std::size_t rows, std::size_t cols) {
    double lo = table.empty() ? 0.0 : table[0], hi = lo;
    for (double v : table) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double span = hi - lo > 0 ? hi - lo : 1.0;
    const double cell = std::max(4.0, std::min(24.0, 560.0 / std::max<std::size_t>(cols, 1)));
    const double width = 80 + cell * cols + 20, height = 60 + cell * rows + 20;
    std::ostringstream svg;
    svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='" << height
        << "'>\n<rect width='100%' height='100%' fill='white'/>\n";
    svg << "<text x='" << width / 2 << "' y='24' text-anchor='middle' font-size='14'>" << title
        << "</text>\n";
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) {
            const double v = (table[r * cols + c] - lo) / span;
            const int shade = static_cast<int>(255 - 215 * v);
            svg << "<rect x='" << 80 + cell * c << "' y='" << 50 + cell * r << "' width='" << cell
                << "' height='" << cell << "' fill='rgb(" << shade << "," << shade << ",255)'/>\n";
        }
    svg << "<text x='10' y='" << 50 + cell * rows / 2
        << "' font-size='11' transform=''>policy</text>\n";
    svg << "<text x='" << 80 + cell * cols / 2 << "' y='" << height - 6
        << "' text-anchor='middle' font-size='11'>reward</text>\n";
    svg << "</svg>\n";
    return svg.str();
}

std::vector<Json> load_results(const std::vector<std::string>& paths) {
    if (paths.empty()) throw ConfigError("plot: no input files");
    std::vector<Json> results;
    for (const auto& p : paths) results.push_back(Json::parse(read_text_file(p)));
    return results;
}

std::vector<std::vector<double>> gap_table(const std::vector<Json>& results) {
    // [iteration][run]
    std::size_t n = std::string::npos;
    for (const auto& r : results) {
        if (!r.contains("trace") || r["trace"].is_null())
            throw ConfigError("plot: result has no iteration trace");
        n = std::min(n, r["trace"].size());
    }
    std::vector<std::vector<double>> table(n);
    for (const auto& r : results)
        for (std::size_t i = 0; i < n; ++i)
            table[i].push_back(r["trace"][i]["gap"].get<double>());
    return table;
}

std::vector<std::string> emit_gap_curve(const PlotRequest& request) {
    const auto results = load_results(request.inputs);
    const auto table = gap_table(results);

    std::ostringstream csv;
    csv << "iter,mean_gap,stderr_gap" << (request.iqm ? ",iqm_gap" : "") << "\n";
    Series mean_series{"mean gap", {}};
    for (std::size_t i = 0; i < table.size(); ++i) {
        const double m = mean_of(table[i]);
        mean_series.y.push_back(m);
        csv << (i + 1) << ',' << fmt(m) << ',' << fmt(sample_stderr(table[i]));
        if (request.iqm) csv << ',' << fmt(interquartile_mean(table[i]));
        csv << '\n';
    }
    const std::string csv_path = request.output_prefix + ".csv";
    const std::string svg_path = request.output_prefix + ".svg";
    write_text_file(csv_path, csv.str());
    write_text_file(svg_path, svg_line_chart("imitation gap per iteration", {mean_series}));
    return {csv_path, svg_path};
}

std::vector<std::string> emit_bound_decomposition(const PlotRequest& request) {
    const auto results = load_results(request.inputs);
    const auto table = gap_table(results);

    double misspec = 0.0, opt = 0.0;
    int horizon = results.front().value("horizon", 1);
    int num_rewards = 1;
    for (const auto& r : results) {
        if (!r.contains("bound") || !r["bound"].contains("epsilon_pi"))
            throw ConfigError("plot: result has no recorded completeness value "
                              "(compute_completeness was off)");
        misspec += horizon * r["bound"]["epsilon_pi"].get<double>();
        const double eps = r["bound"].value("epsilon", 0.0);
        opt += static_cast<double>(horizon) * horizon * eps;
        num_rewards = r["bound"].value("num_base_rewards", 1);
    }
    misspec /= static_cast<double>(results.size());
    opt /= static_cast<double>(results.size());

    std::ostringstream csv;
    csv << "iter,realized_gap,misspec_term,opt_term,regret_term,bound_total\n";
    Series realized{"running mixture gap", {}};
    Series bound{"bound", {}};
    double running = 0.0;
    for (std::size_t i = 0; i < table.size(); ++i) {
        running += mean_of(table[i]);
        const double avg_gap = running / static_cast<double>(i + 1);
        const double regret =
            num_rewards > 1
                ? horizon * std::sqrt(std::log(static_cast<double>(num_rewards)) /
                                      static_cast<double>(i + 1))
                : 0.0;
        const double total = misspec + opt + regret;
        realized.y.push_back(avg_gap);
        bound.y.push_back(total);
        csv << (i + 1) << ',' << fmt(avg_gap) << ',' << fmt(misspec) << ',' << fmt(opt) << ','
            << fmt(regret) << ',' << fmt(total) << '\n';
    }
    const std::string csv_path = request.output_prefix + ".csv";
    const std::string svg_path = request.output_prefix + ".svg";
    write_text_file(csv_path, csv.str());
    write_text_file(svg_path, svg_line_chart("realized gap vs outer-loop bound", {realized, bound}));
    return {csv_path, svg_path};
}

std::vector<std::string> emit_coverage_table(const PlotRequest& request) {
    const auto results = load_results(request.inputs);

    struct Row {
        std::string scenario;
        std::string reset;
        double n_pairs = 1.0;
        double m_pairs = 1.0;
    };
    std::map<std::string, Row> rows;
    for (const auto& r : results) {
        Row row;
        row.scenario = r.at("scenario").get<std::string>();
        row.reset = r.value("reset", std::string("-"));
        row.n_pairs = r.value("num_expert_pairs", 1.0);
        row.m_pairs = r.value("num_offline_pairs", 1.0);
        rows[row.scenario + "|" + row.reset] = row;
    }

    std::ostringstream csv;
    csv << "scenario,reset,coverage_cb,basis\n";
    for (const auto& [key, row] : rows) {
        (void)key;
        const Scenario scenario = build_scenario(row.scenario);
        const PiStarResult pistar = best_realizable_policy(scenario.mdp, scenario.policy_class,
                                                           scenario.reward_class, scenario.expert);
        const OccupancyTensor num = compute_occupancy(scenario.mdp, pistar.policy);

        const ResetSpec spec =
            row.reset == "-" ? ResetSpec::parse("start_state") : ResetSpec::parse(row.reset);
        double cb = std::numeric_limits<double>::infinity();
        std::string basis = "state-action";
        if (spec.kind == "expert_demos" || (spec.kind == "occupancy" && spec.policy == "expert")) {
            cb = coverage_coefficient(num, compute_occupancy(scenario.mdp, scenario.expert));
        } else if (spec.kind == "offline_demos" || spec.kind == "mixture" ||
                   (spec.kind == "occupancy" && spec.policy != "expert")) {
            if (spec.kind == "occupancy" && spec.policy == "pistar") {
                cb = 1.0;
            } else if (scenario.offline_policy) {
                OccupancyTensor den = compute_occupancy(scenario.mdp, *scenario.offline_policy);
                if (spec.kind == "mixture") {
                    // nu: the sample-count-weighted mixture of the two occupancies
                    const OccupancyTensor exp_occ =
                        compute_occupancy(scenario.mdp, scenario.expert);
                    const double total = row.n_pairs + row.m_pairs;
                    for (std::size_t i = 0; i < den.per_step.size(); ++i)
                        den.per_step[i] =
                            (row.n_pairs * exp_occ.per_step[i] + row.m_pairs * den.per_step[i]) /
                            total;
                    for (std::size_t i = 0; i < den.averaged.size(); ++i)
                        den.averaged[i] =
                            (row.n_pairs * exp_occ.averaged[i] + row.m_pairs * den.averaged[i]) /
                            total;
                }
                cb = coverage_coefficient(num, den);
            }
        } else if (spec.kind == "start_state") {
            // No generating policy: compare state marginals against mu.
            basis = "state";
            double best = 0.0;
            for (int s = 0; s < scenario.mdp.num_states(); ++s) {
                double avg = 0.0;
                for (int h = 0; h < num.horizon; ++h) avg += num.state_marginal(h, s);
                avg /= num.horizon;
                if (avg <= 0.0) continue;
                const double mu = scenario.mdp.start_dist()[static_cast<std::size_t>(s)];
                if (mu <= 0.0) {
                    best = std::numeric_limits<double>::infinity();
                    break;
                }
                best = std::max(best, avg / mu);
            }
            cb = best;
        }
        csv << row.scenario << ',' << row.reset << ',' << (std::isinf(cb) ? "inf" : fmt(cb)) << ','
            << basis << '\n';
    }
    const std::string csv_path = request.output_prefix + ".csv";
    write_text_file(csv_path, csv.str());
    return {csv_path};
}

std::vector<std::string> emit_completeness_heatmap(const PlotRequest& request) {
    if (request.inputs.size() != 1)
        throw ConfigError("plot: completeness_heatmap takes exactly one report JSON");
    const Json report = Json::parse(read_text_file(request.inputs.front()));
    if (!report.contains("per_pair_errors") || report["per_pair_errors"].is_null())
        throw ConfigError("plot: report has no per-pair error table");

    const Json& table = report["per_pair_errors"];
    const std::size_t rows = table.size();
    const std::size_t cols = rows > 0 ? table[0].size() : 0;
    std::vector<double> flat;
    flat.reserve(rows * cols);

    std::ostringstream csv;
    csv << "policy_index,reward_index,error\n";
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) {
            const double v = table[r][c].get<double>();
            flat.push_back(v);
            csv << r << ',' << c << ',' << fmt(v) << '\n';
        }
    const std::string csv_path = request.output_prefix + ".csv";
    const std::string svg_path = request.output_prefix + ".svg";
    write_text_file(csv_path, csv.str());
    write_text_file(svg_path, svg_heatmap("completeness error per (policy, reward)", flat, rows,
                                          cols));
    return {csv_path, svg_path};
}

}  // namespace

std::vector<std::string> emit_plot_data(const PlotRequest& request) {
    if (request.output_prefix.empty()) throw ConfigError("plot: output prefix required");
    if (request.kind == "gap_curve") return emit_gap_curve(request);
    if (request.kind == "bound_decomposition") return emit_bound_decomposition(request);
    if (request.kind == "coverage_table") return emit_coverage_table(request);
    if (request.kind == "completeness_heatmap") return emit_completeness_heatmap(request);
    throw ConfigError("plot: unknown kind " + request.kind);
}

}  // namespace irlab
