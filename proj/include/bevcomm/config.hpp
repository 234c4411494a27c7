#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bevcomm/protocol.hpp"
#include "bevcomm/scenario_gen.hpp"

namespace bevcomm {

// One JSON document drives every tool invocation; command-line flags
// override individual fields after the file is read.

struct ExperimentConfig {
    PipelineConfig pipeline;
    SuiteTemplate suite;

    // Seeds for suite-driven sweeps: explicit list wins, otherwise
    // base_seed .. base_seed + seed_count - 1.
    std::vector<std::uint64_t> seeds;
    std::uint64_t base_seed = 1;
    int seed_count = 20;

    // Bandwidth sweep: explicit byte budgets plus fractions of the dense
    // feature total for the configured round count.
    std::vector<std::int64_t> budgets_bytes;
    std::vector<double> budget_fractions;

    // Round sweep: round counts paired with allocation schedules (an empty
    // schedule means the built-in default for that count).
    std::vector<int> round_counts;
    std::vector<std::vector<double>> allocations;

    // Noise sweep: pose error standard deviations in meters.
    std::vector<double> sigmas;

    std::string scenario_path;  // run-one input
    std::string out_csv;
    std::string out_log;

    std::vector<std::uint64_t> resolved_seeds() const;
};

// Bytes needed to ship every cell of every directed link in every round:
// rounds * N(N-1) * H * W * D * 4.
std::int64_t dense_feature_bytes(const GridShape& grid, int agent_count, int rounds);

std::vector<std::int64_t> resolved_budgets(const ExperimentConfig& cfg);

ExperimentConfig config_from_json_text(const std::string& text);
std::string config_to_json_text(const ExperimentConfig& cfg);
ExperimentConfig load_config(const std::string& path);

}  // namespace bevcomm
