#pragma once

#include <string>
#include <vector>

#include "bevcomm/config.hpp"

namespace bevcomm {

// Sweep drivers. Each returns the complete CSV document (header included)
// as a string; identical config and seeds reproduce the bytes exactly.

// One row per (seed, budget):
//   seed,K,budget_bytes,volume_log2,request_bytes,ap50,ap70,ap50_round0
std::string sweep_bandwidth(const ExperimentConfig& cfg);

// One row per (seed, round-count/allocation pair):
//   seed,K,allocation,budget_bytes,volume_log2,request_bytes,ap50,ap70,ap50_round0
std::string sweep_rounds(const ExperimentConfig& cfg);

// One row per (sigma, seed, method), method is "collab" or "no-collab":
//   method,sigma,seed,budget_bytes,volume_log2,ap50,ap70
std::string sweep_noise(const ExperimentConfig& cfg);

// Full single-run record (per-round graphs, per-link byte ledgers,
// per-agent APs) as a JSON document.
std::string run_one_log(const Scenario& scenario, const PipelineConfig& cfg);

// Writes count scenarios (seed base_seed + i) into dir as
// scenario_<seed>.json; returns the file paths.
std::vector<std::string> generate_scenarios(const SuiteTemplate& t, int count,
                                            std::uint64_t base_seed, const std::string& dir);

// Fixed-precision float formatting shared by every CSV writer, so reruns
// are byte-identical.
std::string csv_double(double v);

// Writes text to path in binary mode; IoError on failure.
void write_text_file(const std::string& path, const std::string& text);

}  // namespace bevcomm
