#include "bevcomm/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bevcomm/rng.hpp"

namespace bevcomm {

namespace {

void require_projection_size(const std::vector<std::vector<double>>& m, int heads, int d_h,
                             int channels, const char* name) {
    if (static_cast<int>(m.size()) != heads) {
        throw ConfigError(std::string("fusion params: ") + name + " must have one matrix per head");
    }
    for (const auto& mat : m) {
        if (mat.size() != static_cast<std::size_t>(d_h) * static_cast<std::size_t>(channels)) {
            throw ConfigError(std::string("fusion params: ") + name + " matrices must be " +
                              std::to_string(d_h) + "x" + std::to_string(channels));
        }
    }
}

}  // namespace

FusionParams FusionParams::seeded(int channels, int heads, std::uint64_t rng_seed) {
    if (channels < 1 || heads < 1 || channels % heads != 0) {
        throw ConfigError("fusion head count must divide the channel count (" +
                          std::to_string(channels) + " channels, " + std::to_string(heads) +
                          " heads)");
    }
    FusionParams p;
    p.heads = heads;
    p.channels = channels;
    p.rng_seed = rng_seed;
    const int d_h = channels / heads;
    const double bound = 1.0 / std::sqrt(static_cast<double>(channels));
    Lcg64 rng(mix_seed(rng_seed, 0xF5, 0));
    auto draw_matrix = [&](int rows, int cols) {
        std::vector<double> m(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols));
        for (double& v : m) v = rng.next_uniform(-bound, bound);
        return m;
    };
    for (int h = 0; h < heads; ++h) {
        p.wq.push_back(draw_matrix(d_h, channels));
        p.wk.push_back(draw_matrix(d_h, channels));
        p.wv.push_back(draw_matrix(d_h, channels));
    }
    p.ffn_w1 = draw_matrix(2 * channels, channels);
    p.ffn_b1 = draw_matrix(2 * channels, 1);
    p.ffn_w2 = draw_matrix(channels, 2 * channels);
    p.ffn_b2 = draw_matrix(channels, 1);
    return p;
}

FusionParams FusionParams::identity() {
    FusionParams p;
    p.identity_mode = true;
    p.heads = 1;
    return p;
}

void FusionParams::validate(int expect_channels) const {
    if (identity_mode) return;
    if (channels != expect_channels) {
        throw ConfigError("fusion params were built for " + std::to_string(channels) +
                          " channels, feature maps have " + std::to_string(expect_channels));
    }
    if (heads < 1 || channels % heads != 0) {
        throw ConfigError("fusion head count must divide the channel count");
    }
    const int d_h = channels / heads;
    require_projection_size(wq, heads, d_h, channels, "wq");
    require_projection_size(wk, heads, d_h, channels, "wk");
    require_projection_size(wv, heads, d_h, channels, "wv");
    const std::size_t d = static_cast<std::size_t>(channels);
    if (ffn_w1.size() != 2 * d * d || ffn_b1.size() != 2 * d || ffn_w2.size() != 2 * d * d ||
        ffn_b2.size() != d) {
        throw ConfigError("fusion feed-forward parameters have the wrong size");
    }
}

double spe_value(double distance, int slot, int channels, double wavelength_base) {
    if (slot < 0 || slot >= channels) {
        throw DimensionError("positional encoding slot out of range");
    }
    const int pair = slot / 2;
    const double wavelength =
        std::pow(wavelength_base, (2.0 * pair) / static_cast<double>(channels));
    const double phase = distance / wavelength;
    return (slot % 2 == 0) ? std::sin(phase) : std::cos(phase);
}

FeatureMap apply_spe(const FeatureMap& f, double sensor_x, double sensor_y, const SpeConfig& cfg) {
    if (!cfg.enabled) return f;
    const GridShape& g = f.shape();
    std::vector<double> out(f.values());
    for (int h = 0; h < g.height; ++h) {
        for (int w = 0; w < g.width; ++w) {
            const double cx = (w + 0.5) * g.cell_size;
            const double cy = (h + 0.5) * g.cell_size;
            const double dist = std::hypot(cx - sensor_x, cy - sensor_y);
            const std::size_t base = static_cast<std::size_t>((h * g.width + w) * g.channels);
            for (int d = 0; d < g.channels; ++d) {
                out[base + static_cast<std::size_t>(d)] +=
                    spe_value(dist, d, g.channels, cfg.wavelength_base);
            }
        }
    }
    return FeatureMap(g, std::move(out));
}

std::vector<ScalarMap> attention_weights(const FeatureMap& ego_query,
                                         const std::vector<FeatureMap>& keys,
                                         const std::vector<ScalarMap>& confidences,
                                         const FusionParams& params) {
    const GridShape& g = ego_query.shape();
    const int n = static_cast<int>(keys.size());
    if (n < 1) {
        throw DimensionError("attention needs at least one contributor");
    }
    if (static_cast<int>(confidences.size()) != n) {
        throw DimensionError("attention needs one confidence map per contributor");
    }
    for (const FeatureMap& k : keys) {
        if (k.shape() != g) throw DimensionError("attention contributors must share the grid shape");
    }
    for (const ScalarMap& c : confidences) {
        if (!c.shape().same_plane(g)) {
            throw DimensionError("attention confidences must share the grid plane");
        }
    }
    params.validate(g.channels);

    const int channels = g.channels;
    const int heads = params.identity_mode ? 1 : params.heads;
    const int d_h = channels / heads;
    const double scale =
        1.0 / std::sqrt(static_cast<double>(params.identity_mode ? channels : d_h));

    std::vector<std::vector<double>> weights(
        static_cast<std::size_t>(n),
        std::vector<double>(static_cast<std::size_t>(g.cell_count()), 0.0));

    std::vector<double> qh(static_cast<std::size_t>(params.identity_mode ? channels : d_h));
    std::vector<double> kh(qh.size());
    std::vector<double> scores(static_cast<std::size_t>(n));
    std::vector<double> head_avg(static_cast<std::size_t>(n));

    for (int cell = 0; cell < g.cell_count(); ++cell) {
        const std::size_t base = static_cast<std::size_t>(cell) * channels;
        std::fill(head_avg.begin(), head_avg.end(), 0.0);
        for (int head = 0; head < heads; ++head) {
            if (params.identity_mode) {
                for (int d = 0; d < channels; ++d) qh[static_cast<std::size_t>(d)] = ego_query.values()[base + d];
            } else {
                const std::vector<double>& wq = params.wq[static_cast<std::size_t>(head)];
                for (int r = 0; r < d_h; ++r) {
                    double acc = 0.0;
                    for (int d = 0; d < channels; ++d) {
                        acc += wq[static_cast<std::size_t>(r * channels + d)] * ego_query.values()[base + d];
                    }
                    qh[static_cast<std::size_t>(r)] = acc;
                }
            }
            for (int j = 0; j < n; ++j) {
                const std::vector<double>& kv = keys[static_cast<std::size_t>(j)].values();
                if (params.identity_mode) {
                    for (int d = 0; d < channels; ++d) kh[static_cast<std::size_t>(d)] = kv[base + d];
                } else {
                    const std::vector<double>& wk = params.wk[static_cast<std::size_t>(head)];
                    for (int r = 0; r < d_h; ++r) {
                        double acc = 0.0;
                        for (int d = 0; d < channels; ++d) {
                            acc += wk[static_cast<std::size_t>(r * channels + d)] * kv[base + d];
                        }
                        kh[static_cast<std::size_t>(r)] = acc;
                    }
                }
                double dot = 0.0;
                for (std::size_t r = 0; r < qh.size(); ++r) dot += qh[r] * kh[r];
                scores[static_cast<std::size_t>(j)] = dot * scale;
            }
            if (params.pairwise_softmax) {
                // Softmax over each contributor alone is identically 1.
                for (int j = 0; j < n; ++j) head_avg[static_cast<std::size_t>(j)] += 1.0;
            } else {
                const double peak = *std::max_element(scores.begin(), scores.end());
                double denom = 0.0;
                for (int j = 0; j < n; ++j) denom += std::exp(scores[static_cast<std::size_t>(j)] - peak);
                for (int j = 0; j < n; ++j) {
                    head_avg[static_cast<std::size_t>(j)] +=
                        std::exp(scores[static_cast<std::size_t>(j)] - peak) / denom;
                }
            }
        }
        for (int j = 0; j < n; ++j) {
            const double w = head_avg[static_cast<std::size_t>(j)] / heads;
            weights[static_cast<std::size_t>(j)][static_cast<std::size_t>(cell)] =
                std::clamp(w * confidences[static_cast<std::size_t>(j)].values()[static_cast<std::size_t>(cell)],
                           0.0, 1.0);
        }
    }

    std::vector<ScalarMap> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        out.emplace_back(g, std::move(weights[static_cast<std::size_t>(j)]));
    }
    return out;
}

FeatureMap fuse(const std::vector<FeatureMap>& values, const std::vector<ScalarMap>& weights,
                const FusionParams& params) {
    const int n = static_cast<int>(values.size());
    if (n < 1) {
        throw DimensionError("fuse needs at least one contributor");
    }
    if (static_cast<int>(weights.size()) != n) {
        throw DimensionError("fuse needs one weight map per contributor");
    }
    const GridShape& g = values.front().shape();
    for (const FeatureMap& v : values) {
        if (v.shape() != g) throw DimensionError("fuse contributors must share the grid shape");
    }
    for (const ScalarMap& w : weights) {
        if (!w.shape().same_plane(g)) throw DimensionError("fuse weights must share the grid plane");
    }
    params.validate(g.channels);

    const int channels = g.channels;
    std::vector<double> out(static_cast<std::size_t>(g.value_count()), 0.0);
    std::vector<double> acc(static_cast<std::size_t>(channels));
    std::vector<double> hidden(static_cast<std::size_t>(2 * channels));
    for (int cell = 0; cell < g.cell_count(); ++cell) {
        const std::size_t base = static_cast<std::size_t>(cell) * channels;
        std::fill(acc.begin(), acc.end(), 0.0);
        for (int j = 0; j < n; ++j) {
            const double w = weights[static_cast<std::size_t>(j)].values()[static_cast<std::size_t>(cell)];
            if (w == 0.0) continue;
            const std::vector<double>& vv = values[static_cast<std::size_t>(j)].values();
            for (int d = 0; d < channels; ++d) acc[static_cast<std::size_t>(d)] += w * vv[base + d];
        }
        if (params.identity_mode) {
            for (int d = 0; d < channels; ++d) out[base + static_cast<std::size_t>(d)] = acc[static_cast<std::size_t>(d)];
        } else {
            for (int r = 0; r < 2 * channels; ++r) {
                double z = params.ffn_b1[static_cast<std::size_t>(r)];
                for (int d = 0; d < channels; ++d) {
                    z += params.ffn_w1[static_cast<std::size_t>(r * channels + d)] * acc[static_cast<std::size_t>(d)];
                }
                hidden[static_cast<std::size_t>(r)] = std::max(0.0, z);
            }
            for (int d = 0; d < channels; ++d) {
                double z = params.ffn_b2[static_cast<std::size_t>(d)];
                for (int r = 0; r < 2 * channels; ++r) {
                    z += params.ffn_w2[static_cast<std::size_t>(d * 2 * channels + r)] * hidden[static_cast<std::size_t>(r)];
                }
                out[base + static_cast<std::size_t>(d)] = z;
            }
        }
    }
    return FeatureMap(g, std::move(out));
}

}  // namespace bevcomm
