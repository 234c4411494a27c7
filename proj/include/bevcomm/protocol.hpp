#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "bevcomm/comm_graph.hpp"
#include "bevcomm/confidence.hpp"
#include "bevcomm/detect.hpp"
#include "bevcomm/fusion.hpp"
#include "bevcomm/packing.hpp"
#include "bevcomm/wire.hpp"
#include "bevcomm/world.hpp"

namespace bevcomm {

// Multi-round exchange loop. Each round: every agent regenerates its
// confidence from its current feature map, scores cells per receiver
// (confidence alone on round 0, confidence gated by the receiver's last
// request map afterwards), packs the top cells its equal share of the round
// budget affords, and ships them. Receivers warp incoming maps by the
// sender's pose error, then fuse ego plus received features with
// confidence-scaled attention. An agent that received no payload cells in a
// round keeps its feature map untouched, so a zero budget degrades exactly
// to single-agent perception.

struct ProtocolConfig {
    int rounds = 1;
    std::int64_t total_budget_bytes = 0;
    // Per-round fractions of the total budget; empty picks the built-in
    // schedule for the round count (1 round: all; 2 rounds: 0.2/0.8;
    // 3 rounds: 0.2/0.6/0.2; otherwise uniform).
    std::vector<double> allocation;
    double noise_sigma = 0.0;  // std of the per-agent planar pose error, meters

    std::vector<double> resolved_allocation() const;
    void validate() const;
};

struct FusionSettings {
    bool identity_mode = true;
    int heads = 4;
    bool pairwise_softmax = false;
    std::uint64_t rng_seed = 7;
};

FusionParams make_fusion_params(const FusionSettings& settings, int channels);

struct PipelineConfig {
    ProtocolConfig protocol;
    PackingConfig packing;
    GeneratorConfig generator;
    FusionSettings fusion;
    SpeConfig spe;
    DetectConfig detect;
};

struct PoseError {
    double dx = 0.0;
    double dy = 0.0;
    double dyaw = 0.0;
};

struct AgentState {
    FeatureMap features;
    ScalarMap confidence;
    // Last request map received from each peer, already warped into this
    // agent's frame; refreshed whenever a new message from that peer lands.
    std::map<int, ScalarMap> received_requests;
    PoseError pose_error;
};

struct WarpedMaps {
    FeatureMap features;
    ScalarMap request;
};

// Rigid nearest-neighbor resample of a received map pair: rotation by dyaw
// about the grid center followed by a (dx, dy) shift. Cells whose source
// falls off the grid read as zero features and a fully-unknown (1.0)
// request.
WarpedMaps warp_received(const FeatureMap& features, const ScalarMap& request,
                         const PoseError& error);

struct LinkLog {
    int sender = 0;
    int receiver = 0;
    int cells = 0;
    std::int64_t feature_bytes = 0;
    std::int64_t request_bytes = 0;
    double volume_log2 = 0.0;
};

struct RoundLog {
    int round = 0;
    std::int64_t budget_bytes = 0;
    std::int64_t feature_bytes = 0;
    std::int64_t request_bytes = 0;
    int edges = 0;
    std::vector<LinkLog> links;
};

// Executes one synchronous exchange round in place.
RoundLog run_round(std::vector<AgentState>& states, const Scenario& scenario,
                   const PipelineConfig& cfg, const FusionParams& fusion_params, int round_k,
                   std::int64_t round_budget_bytes);

struct TradeoffPoint {
    std::int64_t feature_bytes = 0;
    std::int64_t request_bytes = 0;
    double volume_log2 = 0.0;  // log2 of total feature bytes, 0 when silent
    double mean_ap50 = 0.0;
    double mean_ap70 = 0.0;
    // Mean AP after each stage: entry 0 is pre-communication, entry k the
    // state after round k-1; rounds+1 entries total.
    std::vector<double> round_ap50;
    std::vector<double> round_ap70;
};

struct ExperimentResult {
    TradeoffPoint point;
    std::vector<RoundLog> rounds;
    std::vector<double> final_agent_ap50;
};

// Full pipeline on one scenario: encode, run all configured rounds, decode
// every agent at every stage, and report the byte ledger with the AP means.
ExperimentResult run_experiment(const Scenario& scenario, const PipelineConfig& cfg);

}  // namespace bevcomm
