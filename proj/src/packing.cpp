#include "bevcomm/packing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace bevcomm {

namespace {

std::vector<double> gaussian_kernel(int kernel_size, double sigma) {
    const int radius = (kernel_size - 1) / 2;
    std::vector<double> k(static_cast<std::size_t>(kernel_size));
    double sum = 0.0;
    for (int t = -radius; t <= radius; ++t) {
        const double v = std::exp(-(static_cast<double>(t) * t) / (2.0 * sigma * sigma));
        k[static_cast<std::size_t>(t + radius)] = v;
        sum += v;
    }
    for (double& v : k) v /= sum;
    return k;
}

}  // namespace

ScalarMap gaussian_filter(const ScalarMap& score, const PackingConfig& cfg) {
    if (!cfg.gaussian_enabled) return score;
    if (cfg.kernel_size < 1 || cfg.kernel_size % 2 == 0) {
        throw ConfigError("gaussian kernel_size must be a positive odd integer, got " +
                          std::to_string(cfg.kernel_size));
    }
    if (!(cfg.sigma > 0.0)) {
        throw ConfigError("gaussian sigma must be positive");
    }
    const GridShape& g = score.shape();
    const int radius = (cfg.kernel_size - 1) / 2;
    const std::vector<double> k = gaussian_kernel(cfg.kernel_size, cfg.sigma);

    // Horizontal pass then vertical pass, zero padding outside the grid.
    std::vector<double> tmp(score.values().size(), 0.0);
    for (int h = 0; h < g.height; ++h) {
        for (int w = 0; w < g.width; ++w) {
            double acc = 0.0;
            for (int t = -radius; t <= radius; ++t) {
                const int ww = w + t;
                if (ww < 0 || ww >= g.width) continue;
                acc += k[static_cast<std::size_t>(t + radius)] * score.at(h, ww);
            }
            tmp[static_cast<std::size_t>(h * g.width + w)] = acc;
        }
    }
    std::vector<double> out(score.values().size(), 0.0);
    for (int h = 0; h < g.height; ++h) {
        for (int w = 0; w < g.width; ++w) {
            double acc = 0.0;
            for (int t = -radius; t <= radius; ++t) {
                const int hh = h + t;
                if (hh < 0 || hh >= g.height) continue;
                acc += k[static_cast<std::size_t>(t + radius)] * tmp[static_cast<std::size_t>(hh * g.width + w)];
            }
            out[static_cast<std::size_t>(h * g.width + w)] = std::clamp(acc, 0.0, 1.0);
        }
    }
    return ScalarMap(g, std::move(out));
}

SelectionMask select_mask(const ScalarMap& score, int budget_cells, const PackingConfig& cfg) {
    (void)cfg;
    if (budget_cells < 0) {
        throw ConfigError("selection budget must be non-negative, got " +
                          std::to_string(budget_cells));
    }
    const GridShape& g = score.shape();
    const int cell_count = g.cell_count();
    const int budget = std::min(budget_cells, cell_count);

    std::vector<int> order;
    order.reserve(static_cast<std::size_t>(cell_count));
    for (int i = 0; i < cell_count; ++i) {
        if (score.values()[static_cast<std::size_t>(i)] > 0.0) order.push_back(i);
    }
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const double sa = score.values()[static_cast<std::size_t>(a)];
        const double sb = score.values()[static_cast<std::size_t>(b)];
        if (sa != sb) return sa > sb;
        return a < b;
    });

    const int take = std::min<int>(budget, static_cast<int>(order.size()));
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(cell_count), 0);
    for (int i = 0; i < take; ++i) mask[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = 1;
    return SelectionMask(g, std::move(mask));
}

ScalarMap pack_score(const ScalarMap& sender_confidence,
                     const std::optional<ScalarMap>& receiver_request, int round_k) {
    if (round_k < 0) {
        throw ProtocolError("pack_score round must be non-negative");
    }
    if (round_k == 0) {
        if (receiver_request.has_value()) {
            throw ProtocolError("round 0 packing must not consult a request map");
        }
        return sender_confidence;
    }
    if (!receiver_request.has_value()) {
        throw ProtocolError("round " + std::to_string(round_k) +
                            " packing needs the receiver's previous request map");
    }
    return elementwise_mul(sender_confidence, *receiver_request);
}

Message pack_message(const FeatureMap& f, const SelectionMask& mask,
                     const ScalarMap& sender_request, std::uint32_t sender,
                     std::uint32_t receiver, std::uint32_t round) {
    const GridShape& g = f.shape();
    if (!g.same_plane(mask.shape()) || !g.same_plane(sender_request.shape())) {
        throw DimensionError("pack_message: feature map, mask and request map must share a plane");
    }
    std::vector<SparseCell> cells;
    cells.reserve(static_cast<std::size_t>(mask.popcount()));
    for (int i = 0; i < g.cell_count(); ++i) {
        if (!mask.values()[static_cast<std::size_t>(i)]) continue;
        SparseCell c;
        c.index = static_cast<std::uint32_t>(i);
        c.values.resize(static_cast<std::size_t>(g.channels));
        const std::size_t base = static_cast<std::size_t>(i) * g.channels;
        for (int d = 0; d < g.channels; ++d) c.values[static_cast<std::size_t>(d)] = f.values()[base + d];
        cells.push_back(std::move(c));
    }
    // The request map travels on the payload's grid shape so the channel
    // count is recoverable from the message alone.
    ScalarMap request(g, sender_request.values());
    return Message{sender, receiver, round, std::move(request), std::move(cells)};
}

}  // namespace bevcomm
