#pragma once

#include <cstdint>
#include <vector>

#include "bevcomm/grid.hpp"

namespace bevcomm {

// Per-location attention fusion. For every grid cell the receiver's own
// feature vector queries the contributors' vectors (scaled dot product,
// softmax across contributors, head-averaged); the resulting weight is
// scaled by the contributor's confidence at that cell — with no
// renormalization afterwards — and the fused vector is the weighted sum of
// contributor features pushed through a feed-forward layer.
//
// Contributors that sent nothing at a cell participate with a zero vector
// and whatever confidence their request map implies, so they soak up
// softmax mass but add no content.

struct FusionParams {
    int heads = 4;
    // Identity mode: single effective head, identity projections, identity
    // feed-forward; scores become q.k/sqrt(D). The analytic reference mode.
    bool identity_mode = false;
    // Degenerate variant: softmax over each contributor alone (weight 1
    // before confidence scaling) instead of jointly across contributors.
    bool pairwise_softmax = false;
    std::uint64_t rng_seed = 0;
    int channels = 0;

    // Per head, row-major d_h x D projection matrices, d_h = channels/heads.
    std::vector<std::vector<double>> wq, wk, wv;
    // Feed-forward D -> 2D -> D with ReLU, row-major.
    std::vector<double> ffn_w1, ffn_b1, ffn_w2, ffn_b2;

    // Draws every matrix entry uniformly from [-1/sqrt(D), 1/sqrt(D)] in a
    // fixed documented order (per head Wq, Wk, Wv; then ffn_w1, ffn_b1,
    // ffn_w2, ffn_b2) so parameter dumps reproduce across runs.
    static FusionParams seeded(int channels, int heads, std::uint64_t rng_seed);
    static FusionParams identity();

    void validate(int expect_channels) const;
};

struct SpeConfig {
    bool enabled = false;
    double wavelength_base = 10000.0;
};

// Sinusoidal encoding of a sensor-to-cell distance: even slots take
// sin(dis / base^(2p/D)), odd slots cos(dis / base^(2p/D)) with p the slot
// pair index.
double spe_value(double distance, int slot, int channels, double wavelength_base = 10000.0);

// Adds the distance encoding from (sensor_x, sensor_y) to every cell's
// feature vector; disabled configs return the map unchanged. The encoding
// conditions the attention inputs only — callers keep aggregating the
// unencoded features.
FeatureMap apply_spe(const FeatureMap& f, double sensor_x, double sensor_y, const SpeConfig& cfg);

// Attention weights per contributor: softmax(q.k/sqrt(d_h)) head-averaged,
// then scaled by that contributor's confidence. keys[j] and confidences[j]
// describe contributor j; the ego's own entry is expected among them.
std::vector<ScalarMap> attention_weights(const FeatureMap& ego_query,
                                         const std::vector<FeatureMap>& keys,
                                         const std::vector<ScalarMap>& confidences,
                                         const FusionParams& params);

// Weighted per-cell sum of contributor features followed by the
// feed-forward layer (identity in identity mode).
FeatureMap fuse(const std::vector<FeatureMap>& values, const std::vector<ScalarMap>& weights,
                const FusionParams& params);

}  // namespace bevcomm
