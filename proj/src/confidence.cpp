#include "bevcomm/confidence.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace bevcomm {

ScalarMap generate_confidence(const FeatureMap& f, const GeneratorConfig& cfg) {
    const GridShape& g = f.shape();
    std::vector<double> out(static_cast<std::size_t>(g.cell_count()));
    switch (cfg.mode) {
        case GeneratorMode::kChannel0:
            for (int cell = 0; cell < g.cell_count(); ++cell) {
                out[static_cast<std::size_t>(cell)] =
                    std::clamp(f.values()[static_cast<std::size_t>(cell) * g.channels], 0.0, 1.0);
            }
            break;
        case GeneratorMode::kLinear: {
            if (static_cast<int>(cfg.weights.size()) != g.channels) {
                throw ConfigError("linear confidence readout needs " + std::to_string(g.channels) +
                                  " weights, got " + std::to_string(cfg.weights.size()));
            }
            for (int cell = 0; cell < g.cell_count(); ++cell) {
                double z = cfg.bias;
                const std::size_t base = static_cast<std::size_t>(cell) * g.channels;
                for (int d = 0; d < g.channels; ++d) {
                    z += cfg.weights[static_cast<std::size_t>(d)] * f.values()[base + d];
                }
                out[static_cast<std::size_t>(cell)] = 1.0 / (1.0 + std::exp(-z));
            }
            break;
        }
    }
    return ScalarMap(g, std::move(out));
}

ScalarMap request_map(const ScalarMap& confidence) {
    std::vector<double> out(confidence.values().size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = 1.0 - confidence.values()[i];
    return ScalarMap(confidence.shape(), std::move(out));
}

ScalarMap confidence_from_request(const ScalarMap& request) {
    return request_map(request);
}

}  // namespace bevcomm
