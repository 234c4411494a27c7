#include "bevcomm/detect.hpp"

#include <algorithm>
#include <cmath>

namespace bevcomm {

namespace {

struct Aabb {
    double x_min, y_min, x_max, y_max;
};

Aabb box_aabb(double cx, double cy, double length, double width, double yaw) {
    const double c = std::abs(std::cos(yaw));
    const double s = std::abs(std::sin(yaw));
    const double half_x = 0.5 * (length * c + width * s);
    const double half_y = 0.5 * (length * s + width * c);
    return {cx - half_x, cy - half_y, cx + half_x, cy + half_y};
}

double aabb_iou(const Aabb& a, const Aabb& b) {
    const double ix = std::max(0.0, std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min));
    const double iy = std::max(0.0, std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min));
    const double inter = ix * iy;
    const double area_a = (a.x_max - a.x_min) * (a.y_max - a.y_min);
    const double area_b = (b.x_max - b.x_min) * (b.y_max - b.y_min);
    const double uni = area_a + area_b - inter;
    return uni > 0.0 ? inter / uni : 0.0;
}

// Greedy matching at one IoU threshold over detections already ranked by
// descending confidence. Returns per-rank true/false-positive flags plus
// the matched pairs.
struct MatchOutcome {
    std::vector<bool> is_tp;
    std::vector<MatchedPair> pairs;
};

MatchOutcome greedy_match(const std::vector<Detection>& ranked,
                          const std::vector<WorldObject>& truth, double iou_threshold) {
    MatchOutcome out;
    out.is_tp.assign(ranked.size(), false);
    std::vector<bool> taken(truth.size(), false);
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        int best = -1;
        double best_iou = iou_threshold;
        for (std::size_t t = 0; t < truth.size(); ++t) {
            if (taken[t]) continue;
            const double iou = iou_aabb(ranked[i], truth[t]);
            if (iou >= best_iou && (best < 0 || iou > best_iou)) {
                best = static_cast<int>(t);
                best_iou = iou;
            }
        }
        if (best >= 0) {
            taken[static_cast<std::size_t>(best)] = true;
            out.is_tp[i] = true;
            out.pairs.push_back({static_cast<int>(i), truth[static_cast<std::size_t>(best)].id});
        }
    }
    return out;
}

// All-point interpolated average precision: area under the monotone
// precision envelope of the ranked PR curve.
double average_precision(const std::vector<bool>& is_tp, std::size_t truth_count) {
    if (truth_count == 0) {
        return is_tp.empty() ? 1.0 : 0.0;
    }
    std::vector<double> precision;
    std::vector<double> recall;
    int tp = 0;
    for (std::size_t i = 0; i < is_tp.size(); ++i) {
        if (is_tp[i]) ++tp;
        precision.push_back(static_cast<double>(tp) / static_cast<double>(i + 1));
        recall.push_back(static_cast<double>(tp) / static_cast<double>(truth_count));
    }
    // Monotone non-increasing envelope from the right.
    for (int i = static_cast<int>(precision.size()) - 2; i >= 0; --i) {
        precision[static_cast<std::size_t>(i)] =
            std::max(precision[static_cast<std::size_t>(i)], precision[static_cast<std::size_t>(i + 1)]);
    }
    double ap = 0.0;
    double prev_recall = 0.0;
    for (std::size_t i = 0; i < precision.size(); ++i) {
        ap += (recall[i] - prev_recall) * precision[i];
        prev_recall = recall[i];
    }
    return ap;
}

}  // namespace

std::vector<Detection> decode(const FeatureMap& f, const DetectConfig& cfg) {
    const GridShape& g = f.shape();
    if (g.channels < 7) {
        throw ConfigError("decode needs at least 7 channels, got " + std::to_string(g.channels));
    }
    std::vector<Detection> out;
    for (int h = 0; h < g.height; ++h) {
        for (int w = 0; w < g.width; ++w) {
            const double c0 = f.at(h, w, 0);
            if (!(c0 > cfg.threshold)) continue;
            bool is_peak = true;
            for (int dh = -1; dh <= 1 && is_peak; ++dh) {
                for (int dw = -1; dw <= 1; ++dw) {
                    if (dh == 0 && dw == 0) continue;
                    const int hh = h + dh;
                    const int ww = w + dw;
                    if (hh < 0 || hh >= g.height || ww < 0 || ww >= g.width) continue;
                    if (f.at(hh, ww, 0) > c0) {
                        is_peak = false;
                        break;
                    }
                }
            }
            if (!is_peak) continue;
            Detection d;
            d.confidence = c0;
            d.x = (w + 0.5) * g.cell_size + f.at(h, w, 1);
            d.y = (h + 0.5) * g.cell_size + f.at(h, w, 2);
            d.length = std::exp(f.at(h, w, 3));
            d.width = std::exp(f.at(h, w, 4));
            const double cos_yaw = f.at(h, w, 5);
            const double sin_yaw = f.at(h, w, 6);
            const double norm = std::hypot(cos_yaw, sin_yaw);
            d.yaw = norm > 0.0 ? std::atan2(sin_yaw / norm, cos_yaw / norm) : 0.0;
            out.push_back(d);
        }
    }
    return out;
}

double iou_aabb(const Detection& d, const WorldObject& o) {
    return aabb_iou(box_aabb(d.x, d.y, d.length, d.width, d.yaw),
                    box_aabb(o.x, o.y, o.length, o.width, o.yaw));
}

EvalResult evaluate(const std::vector<Detection>& detections,
                    const std::vector<WorldObject>& truth) {
    std::vector<Detection> ranked(detections);
    std::sort(ranked.begin(), ranked.end(), [](const Detection& a, const Detection& b) {
        if (a.confidence != b.confidence) return a.confidence > b.confidence;
        if (a.x != b.x) return a.x < b.x;
        return a.y < b.y;
    });

    const MatchOutcome m50 = greedy_match(ranked, truth, 0.5);
    const MatchOutcome m70 = greedy_match(ranked, truth, 0.7);

    EvalResult r;
    r.ap50 = average_precision(m50.is_tp, truth.size());
    r.ap70 = average_precision(m70.is_tp, truth.size());
    r.matches50 = m50.pairs;
    const int tp50 = static_cast<int>(m50.pairs.size());
    r.precision50 = ranked.empty() ? (truth.empty() ? 1.0 : 0.0)
                                   : static_cast<double>(tp50) / static_cast<double>(ranked.size());
    r.recall50 = truth.empty() ? 1.0 : static_cast<double>(tp50) / static_cast<double>(truth.size());
    return r;
}

}  // namespace bevcomm
