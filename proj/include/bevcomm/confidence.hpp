#pragma once

#include <vector>

#include "bevcomm/grid.hpp"

namespace bevcomm {

// Spatial confidence estimation: collapses a feature map to a per-cell
// score in [0, 1] that says how likely the cell holds an object. The
// complement of a confidence map is the request map an agent broadcasts to
// ask peers for exactly the places it cannot perceive itself.

enum class GeneratorMode {
    // Confidence is channel 0 clamped to [0, 1]; the occupancy channel is
    // its own detector head.
    kChannel0,
    // Logistic readout sigma(w . f + b) over the full channel vector.
    kLinear,
};

struct GeneratorConfig {
    GeneratorMode mode = GeneratorMode::kChannel0;
    std::vector<double> weights;  // length D, linear mode only
    double bias = 0.0;
};

ScalarMap generate_confidence(const FeatureMap& f, const GeneratorConfig& cfg);

// r = 1 - c and its inverse; the two maps are complements by construction.
ScalarMap request_map(const ScalarMap& confidence);
ScalarMap confidence_from_request(const ScalarMap& request);

}  // namespace bevcomm
