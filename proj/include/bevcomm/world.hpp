#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bevcomm/grid.hpp"

namespace bevcomm {

// Synthetic occlusion worlds. A scenario places agents, rotated-box objects
// and axis-aligned opaque occluders on a shared metric plane; the grid spans
// x in [0, width*cell_size], y in [0, height*cell_size] with cell (h, w)
// centered at ((w+0.5)*cell_size, (h+0.5)*cell_size).

struct AgentPose {
    double x = 0.0;
    double y = 0.0;
    double yaw = 0.0;  // radians, wrapped to [-pi, pi)
    double sensing_range = 0.0;
};

struct WorldObject {
    int id = 0;
    double x = 0.0;
    double y = 0.0;
    double length = 0.0;  // extent along the object's heading
    double width = 0.0;
    double yaw = 0.0;
};

struct Occluder {
    double x_min = 0.0;
    double y_min = 0.0;
    double x_max = 0.0;
    double y_max = 0.0;
    bool opaque = true;
};

struct Scenario {
    GridShape grid;
    std::vector<AgentPose> agents;
    std::vector<WorldObject> objects;
    std::vector<Occluder> occluders;
    std::uint64_t rng_seed = 0;
    // Amplitude of the zero-mean uniform noise added to channel 0; 0 keeps
    // the occupancy channel exact.
    double noise_amplitude = 0.0;
    // When set, the amplitude ramps linearly with distance from the sensor,
    // reaching the configured value at sensing_range.
    bool noise_distance_decay = false;

    void validate() const;
};

// Wraps an angle into [-pi, pi).
double wrap_angle(double yaw);

// 1.0 when the cell center is within the agent's sensing range and the
// sight segment from the agent to the cell center crosses no opaque
// occluder's interior; 0.0 otherwise.
double visibility(const AgentPose& agent, int h, int w, const Scenario& scenario);

// True when the open interior of the axis-aligned rectangle intersects the
// segment (x0,y0)-(x1,y1); touching only the boundary does not count.
bool segment_crosses_rect(double x0, double y0, double x1, double y1, const Occluder& rect);

// Index into scenario.objects of the first object whose rotated footprint
// contains the cell center, or -1 when the cell is free.
int object_at_cell(int h, int w, const Scenario& scenario);

// Renders the agent's view of the scenario into a feature map:
//   channel 0      visibility * occupancy, plus clamped noise
//   channels 1..2  box center offsets from the cell center (meters)
//   channels 3..4  log box length / log box width
//   channels 5..6  cos / sin of box yaw
//   channels 7+    seeded pseudo-random values in [-1, 1]
// Regression channels are written only at visible occupied cells.
// Requires grid.channels >= 7.
FeatureMap encode(int agent_index, const Scenario& scenario);

// Scene-global evaluation ground truth: every object inside the grid extent,
// independent of any agent's visibility.
std::vector<WorldObject> ground_truth(const Scenario& scenario);

// JSON serialization. rng_seed is mandatory on load.
Scenario scenario_from_json_text(const std::string& text);
std::string scenario_to_json_text(const Scenario& scenario);
Scenario load_scenario(const std::string& path);
void save_scenario(const Scenario& scenario, const std::string& path);

}  // namespace bevcomm
