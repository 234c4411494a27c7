#pragma once

#include <vector>

#include "bevcomm/grid.hpp"
#include "bevcomm/world.hpp"

namespace bevcomm {

// Detection head over the occupancy channel plus evaluation against the
// scene ground truth.

struct Detection {
    double confidence = 0.0;
    double x = 0.0;
    double y = 0.0;
    double length = 0.0;
    double width = 0.0;
    double yaw = 0.0;
};

struct DetectConfig {
    double threshold = 0.5;  // channel-0 cutoff
};

struct MatchedPair {
    int detection = 0;  // index into the ranked detection list
    int object_id = 0;
};

struct EvalResult {
    double ap50 = 0.0;
    double ap70 = 0.0;
    double precision50 = 0.0;  // over all supplied detections
    double recall50 = 0.0;
    std::vector<MatchedPair> matches50;
};

// One detection per cell whose channel 0 exceeds the threshold and is no
// smaller than any of its 3x3 neighbors. Channels 1..6 decode as center
// offsets from the cell center, log length / log width, and the yaw
// cos/sin pair (renormalized; a zero pair reads as yaw 0).
std::vector<Detection> decode(const FeatureMap& f, const DetectConfig& cfg);

// Overlap of the axis-aligned bounding rectangles of the two rotated boxes.
double iou_aabb(const Detection& d, const WorldObject& o);

// Greedy confidence-descending matching at IoU 0.5 and 0.7, then average
// precision by all-point interpolation of the precision envelope.
EvalResult evaluate(const std::vector<Detection>& detections,
                    const std::vector<WorldObject>& truth);

}  // namespace bevcomm
