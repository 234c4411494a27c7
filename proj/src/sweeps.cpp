#include "bevcomm/sweeps.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <utility>

#include <json.hpp>

#include "bevcomm/errors.hpp"

namespace bevcomm {

namespace {

using nlohmann::json;

// "a:b:c" rendering of an allocation schedule.
std::string join_fractions(const std::vector<double>& fractions) {
    std::string out;
    for (std::size_t i = 0; i < fractions.size(); ++i) {
        if (i > 0) out += ':';
        out += csv_double(fractions[i]);
    }
    return out;
}

}  // namespace

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open for writing: " + path);
    }
    out << text;
    if (!out) {
        throw IoError("write failed: " + path);
    }
}

std::string csv_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return std::string(buf);
}

std::string sweep_bandwidth(const ExperimentConfig& cfg) {
    const std::vector<std::uint64_t> seeds = cfg.resolved_seeds();
    const std::vector<std::int64_t> budgets = resolved_budgets(cfg);
    std::string out = "seed,K,budget_bytes,volume_log2,request_bytes,ap50,ap70,ap50_round0\n";
    for (const std::uint64_t seed : seeds) {
        const Scenario scenario = make_scenario(cfg.suite, seed);
        for (const std::int64_t budget : budgets) {
            PipelineConfig pc = cfg.pipeline;
            pc.protocol.total_budget_bytes = budget;
            const ExperimentResult res = run_experiment(scenario, pc);
            out += std::to_string(seed);
            out += ',';
            out += std::to_string(pc.protocol.rounds);
            out += ',';
            out += std::to_string(budget);
            out += ',';
            out += csv_double(res.point.volume_log2);
            out += ',';
            out += std::to_string(res.point.request_bytes);
            out += ',';
            out += csv_double(res.point.mean_ap50);
            out += ',';
            out += csv_double(res.point.mean_ap70);
            out += ',';
            out += csv_double(res.point.round_ap50.front());
            out += '\n';
        }
    }
    return out;
}

std::string sweep_rounds(const ExperimentConfig& cfg) {
    const std::vector<std::uint64_t> seeds = cfg.resolved_seeds();
    const std::vector<std::int64_t> budgets = resolved_budgets(cfg);
    const std::vector<int> counts =
        cfg.round_counts.empty() ? std::vector<int>{1, 2, 3} : cfg.round_counts;
    std::vector<std::vector<double>> allocs = cfg.allocations;
    if (allocs.empty()) {
        allocs.assign(counts.size(), {});
    } else if (allocs.size() != counts.size()) {
        throw ConfigError("allocations must pair one schedule per round count (" +
                          std::to_string(counts.size()) + " counts, " +
                          std::to_string(allocs.size()) + " schedules)");
    }

    std::string out =
        "seed,K,allocation,budget_bytes,volume_log2,request_bytes,ap50,ap70,ap50_round0\n";
    for (const std::uint64_t seed : seeds) {
        const Scenario scenario = make_scenario(cfg.suite, seed);
        for (std::size_t v = 0; v < counts.size(); ++v) {
            for (const std::int64_t budget : budgets) {
                PipelineConfig pc = cfg.pipeline;
                pc.protocol.rounds = counts[v];
                pc.protocol.allocation = allocs[v];
                pc.protocol.total_budget_bytes = budget;
                const ExperimentResult res = run_experiment(scenario, pc);
                out += std::to_string(seed);
                out += ',';
                out += std::to_string(counts[v]);
                out += ',';
                out += join_fractions(pc.protocol.resolved_allocation());
                out += ',';
                out += std::to_string(budget);
                out += ',';
                out += csv_double(res.point.volume_log2);
                out += ',';
                out += std::to_string(res.point.request_bytes);
                out += ',';
                out += csv_double(res.point.mean_ap50);
                out += ',';
                out += csv_double(res.point.mean_ap70);
                out += ',';
                out += csv_double(res.point.round_ap50.front());
                out += '\n';
            }
        }
    }
    return out;
}

std::string sweep_noise(const ExperimentConfig& cfg) {
    const std::vector<std::uint64_t> seeds = cfg.resolved_seeds();
    const std::vector<std::int64_t> budgets = resolved_budgets(cfg);
    // The noise sweep runs at one operating point: the largest configured
    // budget, so zero-noise rows line up with the bandwidth sweep's
    // full-budget rows.
    const std::int64_t budget = *std::max_element(budgets.begin(), budgets.end());
    const std::vector<double> sigmas =
        cfg.sigmas.empty() ? std::vector<double>{0.0, 0.5, 1.0, 2.0} : cfg.sigmas;

    std::string out = "method,sigma,seed,budget_bytes,volume_log2,ap50,ap70\n";
    for (const double sigma : sigmas) {
        if (sigma < 0.0) throw ConfigError("noise sigmas must be non-negative");
        for (const std::uint64_t seed : seeds) {
            const Scenario scenario = make_scenario(cfg.suite, seed);

            PipelineConfig collab = cfg.pipeline;
            collab.protocol.noise_sigma = sigma;
            collab.protocol.total_budget_bytes = budget;
            const ExperimentResult res = run_experiment(scenario, collab);
            out += "collab,";
            out += csv_double(sigma);
            out += ',';
            out += std::to_string(seed);
            out += ',';
            out += std::to_string(budget);
            out += ',';
            out += csv_double(res.point.volume_log2);
            out += ',';
            out += csv_double(res.point.mean_ap50);
            out += ',';
            out += csv_double(res.point.mean_ap70);
            out += '\n';

            PipelineConfig solo = cfg.pipeline;
            solo.protocol.rounds = 0;
            solo.protocol.allocation.clear();
            solo.protocol.noise_sigma = sigma;
            solo.protocol.total_budget_bytes = 0;
            const ExperimentResult base = run_experiment(scenario, solo);
            out += "no-collab,";
            out += csv_double(sigma);
            out += ',';
            out += std::to_string(seed);
            out += ",0,";
            out += csv_double(base.point.volume_log2);
            out += ',';
            out += csv_double(base.point.mean_ap50);
            out += ',';
            out += csv_double(base.point.mean_ap70);
            out += '\n';
        }
    }
    return out;
}

std::string run_one_log(const Scenario& scenario, const PipelineConfig& cfg) {
    const ExperimentResult res = run_experiment(scenario, cfg);

    std::string out;
    json meta;
    meta["record"] = "meta";
    meta["agents"] = scenario.agents.size();
    meta["grid"] = {{"height", scenario.grid.height},
                    {"width", scenario.grid.width},
                    {"channels", scenario.grid.channels},
                    {"cell_size", scenario.grid.cell_size}};
    meta["rng_seed"] = scenario.rng_seed;
    meta["rounds"] = cfg.protocol.rounds;
    meta["allocation"] = cfg.protocol.resolved_allocation();
    meta["total_budget_bytes"] = cfg.protocol.total_budget_bytes;
    meta["noise_sigma"] = cfg.protocol.noise_sigma;
    out += meta.dump();
    out += '\n';

    for (const RoundLog& r : res.rounds) {
        json jr;
        jr["record"] = "round";
        jr["round"] = r.round;
        jr["budget_bytes"] = r.budget_bytes;
        jr["feature_bytes"] = r.feature_bytes;
        jr["request_bytes"] = r.request_bytes;
        jr["edges"] = r.edges;
        json links = json::array();
        for (const LinkLog& l : r.links) {
            links.push_back({{"sender", l.sender},
                             {"receiver", l.receiver},
                             {"cells", l.cells},
                             {"feature_bytes", l.feature_bytes},
                             {"request_bytes", l.request_bytes},
                             {"volume_log2", l.volume_log2}});
        }
        jr["links"] = links;
        out += jr.dump();
        out += '\n';
    }

    json summary;
    summary["record"] = "summary";
    summary["feature_bytes"] = res.point.feature_bytes;
    summary["request_bytes"] = res.point.request_bytes;
    summary["volume_log2"] = res.point.volume_log2;
    summary["mean_ap50"] = res.point.mean_ap50;
    summary["mean_ap70"] = res.point.mean_ap70;
    summary["round_ap50"] = res.point.round_ap50;
    summary["round_ap70"] = res.point.round_ap70;
    summary["final_agent_ap50"] = res.final_agent_ap50;
    out += summary.dump();
    out += '\n';
    return out;
}

std::vector<std::string> generate_scenarios(const SuiteTemplate& t, int count,
                                            std::uint64_t base_seed, const std::string& dir) {
    if (count < 0) throw ConfigError("scenario count must be non-negative");
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create directory " + dir + ": " + ec.message());
    }
    std::vector<std::string> paths;
    for (int i = 0; i < count; ++i) {
        const std::uint64_t seed = base_seed + static_cast<std::uint64_t>(i);
        const Scenario scenario = make_scenario(t, seed);
        const std::string path =
            (std::filesystem::path(dir) / ("scenario_" + std::to_string(seed) + ".json")).string();
        save_scenario(scenario, path);
        paths.push_back(path);
    }
    return paths;
}

}  // namespace bevcomm
