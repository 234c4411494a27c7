#include "bevcomm/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "bevcomm/rng.hpp"

namespace bevcomm {

namespace {

// Expands a message's sparse payload onto a dense grid.
FeatureMap sparse_to_dense(const Message& m, const GridShape& grid) {
    if (m.request.shape().height != grid.height || m.request.shape().width != grid.width ||
        m.channels() != grid.channels) {
        throw ProtocolError("received message grid does not match the scenario grid");
    }
    std::vector<double> values(static_cast<std::size_t>(grid.value_count()), 0.0);
    for (const SparseCell& c : m.cells) {
        const std::size_t base = static_cast<std::size_t>(c.index) * grid.channels;
        for (int d = 0; d < grid.channels; ++d) {
            values[base + static_cast<std::size_t>(d)] = c.values[static_cast<std::size_t>(d)];
        }
    }
    return FeatureMap(grid, std::move(values));
}

double mean(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

}  // namespace

std::vector<double> ProtocolConfig::resolved_allocation() const {
    if (!allocation.empty()) return allocation;
    switch (rounds) {
        case 0:
            return {};
        case 1:
            return {1.0};
        case 2:
            return {0.2, 0.8};
        case 3:
            return {0.2, 0.6, 0.2};
        default:
            return std::vector<double>(static_cast<std::size_t>(rounds),
                                       1.0 / static_cast<double>(rounds));
    }
}

void ProtocolConfig::validate() const {
    if (rounds < 0) {
        throw ConfigError("protocol rounds must be non-negative");
    }
    if (total_budget_bytes < 0) {
        throw ConfigError("protocol budget must be non-negative");
    }
    if (noise_sigma < 0.0) {
        throw ConfigError("protocol noise_sigma must be non-negative");
    }
    const std::vector<double> alloc = resolved_allocation();
    if (static_cast<int>(alloc.size()) != rounds) {
        throw ConfigError("allocation must list one fraction per round (" +
                          std::to_string(rounds) + " rounds, " + std::to_string(alloc.size()) +
                          " fractions)");
    }
    double sum = 0.0;
    for (double a : alloc) {
        if (a < 0.0) throw ConfigError("allocation fractions must be non-negative");
        sum += a;
    }
    if (sum > 1.0 + 1e-9) {
        throw ConfigError("allocation fractions must sum to at most 1");
    }
}

FusionParams make_fusion_params(const FusionSettings& settings, int channels) {
    if (settings.identity_mode) {
        FusionParams p = FusionParams::identity();
        p.pairwise_softmax = settings.pairwise_softmax;
        return p;
    }
    FusionParams p = FusionParams::seeded(channels, settings.heads, settings.rng_seed);
    p.pairwise_softmax = settings.pairwise_softmax;
    return p;
}

WarpedMaps warp_received(const FeatureMap& features, const ScalarMap& request,
                         const PoseError& error) {
    const GridShape& g = features.shape();
    if (!g.same_plane(request.shape())) {
        throw DimensionError("warp_received: feature and request maps must share a plane");
    }
    if (error.dx == 0.0 && error.dy == 0.0 && error.dyaw == 0.0) {
        return {features, request};
    }
    const double center_x = 0.5 * g.width * g.cell_size;
    const double center_y = 0.5 * g.height * g.cell_size;
    const double c = std::cos(error.dyaw);
    const double s = std::sin(error.dyaw);

    std::vector<double> zf(static_cast<std::size_t>(g.value_count()), 0.0);
    std::vector<double> rq(static_cast<std::size_t>(g.cell_count()), 1.0);
    for (int h = 0; h < g.height; ++h) {
        for (int w = 0; w < g.width; ++w) {
            // Invert the rigid motion: undo the shift, then the rotation
            // about the grid center, and read the covering source cell.
            const double px = (w + 0.5) * g.cell_size - error.dx - center_x;
            const double py = (h + 0.5) * g.cell_size - error.dy - center_y;
            const double sx = c * px + s * py + center_x;
            const double sy = -s * px + c * py + center_y;
            const int sw = static_cast<int>(std::floor(sx / g.cell_size));
            const int sh = static_cast<int>(std::floor(sy / g.cell_size));
            if (sw < 0 || sw >= g.width || sh < 0 || sh >= g.height) continue;
            const std::size_t dst = static_cast<std::size_t>(h * g.width + w);
            const std::size_t src = static_cast<std::size_t>(sh * g.width + sw);
            rq[dst] = request.values()[src];
            for (int d = 0; d < g.channels; ++d) {
                zf[dst * g.channels + static_cast<std::size_t>(d)] =
                    features.values()[src * g.channels + static_cast<std::size_t>(d)];
            }
        }
    }
    return {FeatureMap(g, std::move(zf)), ScalarMap(request.shape(), std::move(rq))};
}

RoundLog run_round(std::vector<AgentState>& states, const Scenario& scenario,
                   const PipelineConfig& cfg, const FusionParams& fusion_params, int round_k,
                   std::int64_t round_budget_bytes) {
    const int n = static_cast<int>(states.size());
    if (n < 1) {
        throw ProtocolError("run_round needs at least one agent");
    }
    if (round_budget_bytes < 0) {
        throw ProtocolError("round budget must be non-negative");
    }
    const GridShape& grid = scenario.grid;

    // Refresh confidences from the current feature maps, then derive the
    // outgoing request maps.
    std::vector<ScalarMap> confidence;
    std::vector<ScalarMap> request;
    confidence.reserve(static_cast<std::size_t>(n));
    request.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        confidence.push_back(generate_confidence(states[static_cast<std::size_t>(i)].features,
                                                 cfg.generator));
        request.push_back(request_map(confidence.back()));
        states[static_cast<std::size_t>(i)].confidence = confidence.back();
    }

    // Equal split of the round budget across directed links, then down to
    // whole cells; floors keep the ledger at or under budget by
    // construction.
    const std::int64_t link_count = static_cast<std::int64_t>(n) * (n - 1);
    const std::int64_t link_bytes = link_count > 0 ? round_budget_bytes / link_count : 0;
    const std::int64_t bytes_per_cell = static_cast<std::int64_t>(grid.channels) * 4;
    const int cells_per_link =
        static_cast<int>(std::min<std::int64_t>(link_bytes / bytes_per_cell, grid.cell_count()));

    RoundLog log;
    log.round = round_k;
    log.budget_bytes = round_budget_bytes;

    std::vector<std::vector<SelectionMask>> masks(
        static_cast<std::size_t>(n), std::vector<SelectionMask>(static_cast<std::size_t>(n),
                                                                SelectionMask::none(grid)));
    // Encoded messages in flight this round, keyed by (sender, receiver).
    std::vector<std::vector<std::vector<std::uint8_t>>> in_flight(
        static_cast<std::size_t>(n), std::vector<std::vector<std::uint8_t>>(static_cast<std::size_t>(n)));

    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            std::optional<ScalarMap> receiver_request;
            if (round_k > 0) {
                const auto it = states[static_cast<std::size_t>(i)].received_requests.find(j);
                if (it == states[static_cast<std::size_t>(i)].received_requests.end()) {
                    throw ProtocolError("agent " + std::to_string(i) + " holds no request map from " +
                                        std::to_string(j) + " for round " + std::to_string(round_k));
                }
                receiver_request = it->second;
            }
            const ScalarMap raw_score = pack_score(confidence[static_cast<std::size_t>(i)],
                                                   receiver_request, round_k);
            const ScalarMap score = gaussian_filter(raw_score, cfg.packing);
            SelectionMask mask = select_mask(score, cells_per_link, cfg.packing);
            const bool deliver = round_k == 0 || mask.any();
            if (deliver) {
                const Message msg = pack_message(states[static_cast<std::size_t>(i)].features, mask,
                                                 request[static_cast<std::size_t>(i)],
                                                 static_cast<std::uint32_t>(i),
                                                 static_cast<std::uint32_t>(j),
                                                 static_cast<std::uint32_t>(round_k));
                in_flight[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                    encode_message(msg);
            }
            masks[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = std::move(mask);
        }
    }

    const CommGraph graph =
        round_k == 0 ? build_graph(0, n, std::nullopt) : build_graph(round_k, n, masks);
    log.edges = graph.edge_count();

    // Deliver, warp, fuse. Every fusion reads pre-round features, so the
    // round is synchronous and delivery order cannot matter.
    std::vector<std::optional<FeatureMap>> next_features(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        std::vector<FeatureMap> values;
        std::vector<FeatureMap> keys;
        std::vector<ScalarMap> confidences;
        std::int64_t received_cells = 0;

        const AgentPose& ego_pose = scenario.agents[static_cast<std::size_t>(i)];
        const FeatureMap& ego_features = states[static_cast<std::size_t>(i)].features;
        values.push_back(ego_features);
        keys.push_back(apply_spe(ego_features, ego_pose.x, ego_pose.y, cfg.spe));
        confidences.push_back(confidence[static_cast<std::size_t>(i)]);

        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            const std::vector<std::uint8_t>& bytes =
                in_flight[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
            if (bytes.empty()) continue;
            const Message msg = decode_message(bytes);
            const VolumeReport vol = measure_message(msg);
            log.links.push_back({j, i, vol.payload_cells, vol.feature_bytes, vol.request_bytes,
                                 vol.volume_log2});
            log.feature_bytes += vol.feature_bytes;
            log.request_bytes += vol.request_bytes;

            const FeatureMap dense = sparse_to_dense(msg, grid);
            const ScalarMap incoming_request(grid, msg.request.values());
            const WarpedMaps warped = warp_received(
                dense, incoming_request, states[static_cast<std::size_t>(j)].pose_error);
            states[static_cast<std::size_t>(i)].received_requests.insert_or_assign(j, warped.request);

            received_cells += vol.payload_cells;
            const AgentPose& peer = scenario.agents[static_cast<std::size_t>(j)];
            const double reported_x = peer.x + states[static_cast<std::size_t>(j)].pose_error.dx;
            const double reported_y = peer.y + states[static_cast<std::size_t>(j)].pose_error.dy;
            keys.push_back(apply_spe(warped.features, reported_x, reported_y, cfg.spe));
            values.push_back(warped.features);
            confidences.push_back(confidence_from_request(warped.request));
        }

        // Nothing of substance arrived: keep the map, skip the update.
        if (received_cells == 0) continue;

        const std::vector<ScalarMap> weights =
            attention_weights(keys.front(), keys, confidences, fusion_params);
        next_features[static_cast<std::size_t>(i)] = fuse(values, weights, fusion_params);
    }

    for (int i = 0; i < n; ++i) {
        if (next_features[static_cast<std::size_t>(i)].has_value()) {
            states[static_cast<std::size_t>(i)].features =
                std::move(*next_features[static_cast<std::size_t>(i)]);
        }
    }
    return log;
}

ExperimentResult run_experiment(const Scenario& scenario, const PipelineConfig& cfg) {
    scenario.validate();
    cfg.protocol.validate();
    const int n = static_cast<int>(scenario.agents.size());
    const FusionParams fusion_params = make_fusion_params(cfg.fusion, scenario.grid.channels);

    std::vector<AgentState> states;
    states.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        FeatureMap f = encode(i, scenario);
        ScalarMap c = generate_confidence(f, cfg.generator);
        PoseError err;
        if (cfg.protocol.noise_sigma > 0.0) {
            Lcg64 rng(mix_seed(scenario.rng_seed, 0x705E, static_cast<std::uint64_t>(i)));
            const auto [gx, gy] = rng.next_gaussian_pair();
            err.dx = cfg.protocol.noise_sigma * gx;
            err.dy = cfg.protocol.noise_sigma * gy;
        }
        states.push_back(AgentState{std::move(f), std::move(c), {}, err});
    }

    const std::vector<WorldObject> truth = ground_truth(scenario);
    auto stage_ap = [&](std::vector<double>& ap50s, std::vector<double>& ap70s) {
        std::vector<double> per_agent50;
        std::vector<double> per_agent70;
        for (const AgentState& st : states) {
            const EvalResult ev = evaluate(decode(st.features, cfg.detect), truth);
            per_agent50.push_back(ev.ap50);
            per_agent70.push_back(ev.ap70);
        }
        ap50s.push_back(mean(per_agent50));
        ap70s.push_back(mean(per_agent70));
        return per_agent50;
    };

    ExperimentResult result;
    std::vector<double> final_agents = stage_ap(result.point.round_ap50, result.point.round_ap70);

    const std::vector<double> alloc = cfg.protocol.resolved_allocation();
    for (int k = 0; k < cfg.protocol.rounds; ++k) {
        const std::int64_t round_budget = static_cast<std::int64_t>(
            std::floor(alloc[static_cast<std::size_t>(k)] *
                       static_cast<double>(cfg.protocol.total_budget_bytes)));
        RoundLog log = run_round(states, scenario, cfg, fusion_params, k, round_budget);
        result.point.feature_bytes += log.feature_bytes;
        result.point.request_bytes += log.request_bytes;
        result.rounds.push_back(std::move(log));
        final_agents = stage_ap(result.point.round_ap50, result.point.round_ap70);
    }

    result.point.volume_log2 =
        result.point.feature_bytes > 0
            ? std::log2(static_cast<double>(result.point.feature_bytes))
            : 0.0;
    result.point.mean_ap50 = result.point.round_ap50.back();
    result.point.mean_ap70 = result.point.round_ap70.back();
    result.final_agent_ap50 = final_agents;
    return result;
}

}  // namespace bevcomm
