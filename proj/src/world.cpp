#include "bevcomm/world.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "bevcomm/rng.hpp"

namespace bevcomm {

namespace {

constexpr double kPi = 3.14159265358979323846;

double cell_center_x(int w, const GridShape& g) { return (w + 0.5) * g.cell_size; }
double cell_center_y(int h, const GridShape& g) { return (h + 0.5) * g.cell_size; }

bool inside_extent(double x, double y, const GridShape& g) {
    return x >= 0.0 && x <= g.width * g.cell_size && y >= 0.0 && y <= g.height * g.cell_size;
}

}  // namespace

double wrap_angle(double yaw) {
    double a = std::fmod(yaw + kPi, 2.0 * kPi);
    if (a < 0.0) a += 2.0 * kPi;
    return a - kPi;
}

void Scenario::validate() const {
    grid.validate();
    if (agents.empty()) {
        throw ConfigError("scenario needs at least one agent");
    }
    for (std::size_t i = 0; i < agents.size(); ++i) {
        const AgentPose& a = agents[i];
        if (!(a.sensing_range > 0.0)) {
            throw ConfigError("agent " + std::to_string(i) + " sensing_range must be positive");
        }
        if (!inside_extent(a.x, a.y, grid)) {
            throw ConfigError("agent " + std::to_string(i) + " lies outside the grid extent");
        }
    }
    std::set<int> ids;
    for (const WorldObject& o : objects) {
        if (!(o.length > 0.0) || !(o.width > 0.0)) {
            throw ConfigError("object " + std::to_string(o.id) + " must have positive size");
        }
        if (!inside_extent(o.x, o.y, grid)) {
            throw ConfigError("object " + std::to_string(o.id) + " center lies outside the grid extent");
        }
        if (!ids.insert(o.id).second) {
            throw ConfigError("duplicate object id " + std::to_string(o.id));
        }
    }
    for (const Occluder& r : occluders) {
        if (!(r.x_min < r.x_max) || !(r.y_min < r.y_max)) {
            throw ConfigError("occluder must have x_min < x_max and y_min < y_max");
        }
    }
    if (noise_amplitude < 0.0) {
        throw ConfigError("noise_amplitude must be non-negative");
    }
}

bool segment_crosses_rect(double x0, double y0, double x1, double y1, const Occluder& rect) {
    // Slab clipping of the segment parameter t in [0, 1]; the rectangle
    // occludes only when the clipped interval has positive length, so a
    // segment that merely grazes the boundary passes.
    double t0 = 0.0;
    double t1 = 1.0;
    const double p[2] = {x0, y0};
    const double d[2] = {x1 - x0, y1 - y0};
    const double lo[2] = {rect.x_min, rect.y_min};
    const double hi[2] = {rect.x_max, rect.y_max};
    for (int axis = 0; axis < 2; ++axis) {
        if (d[axis] == 0.0) {
            if (p[axis] <= lo[axis] || p[axis] >= hi[axis]) return false;
            continue;
        }
        double ta = (lo[axis] - p[axis]) / d[axis];
        double tb = (hi[axis] - p[axis]) / d[axis];
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
        if (t0 >= t1) return false;
    }
    return true;
}

double visibility(const AgentPose& agent, int h, int w, const Scenario& scenario) {
    const double cx = cell_center_x(w, scenario.grid);
    const double cy = cell_center_y(h, scenario.grid);
    const double dx = cx - agent.x;
    const double dy = cy - agent.y;
    if (dx * dx + dy * dy > agent.sensing_range * agent.sensing_range) return 0.0;
    for (const Occluder& rect : scenario.occluders) {
        if (rect.opaque && segment_crosses_rect(agent.x, agent.y, cx, cy, rect)) return 0.0;
    }
    return 1.0;
}

int object_at_cell(int h, int w, const Scenario& scenario) {
    const double cx = cell_center_x(w, scenario.grid);
    const double cy = cell_center_y(h, scenario.grid);
    for (std::size_t i = 0; i < scenario.objects.size(); ++i) {
        const WorldObject& o = scenario.objects[i];
        // Cell center expressed in the object frame; strict containment so a
        // center exactly on the footprint edge stays free.
        const double c = std::cos(o.yaw);
        const double s = std::sin(o.yaw);
        const double rx = cx - o.x;
        const double ry = cy - o.y;
        const double local_x = c * rx + s * ry;
        const double local_y = -s * rx + c * ry;
        if (std::abs(local_x) < o.length * 0.5 && std::abs(local_y) < o.width * 0.5) {
            return static_cast<int>(i);
        }
    }
    return -1;
}

FeatureMap encode(int agent_index, const Scenario& scenario) {
    scenario.validate();
    if (agent_index < 0 || agent_index >= static_cast<int>(scenario.agents.size())) {
        throw ConfigError("encode: agent index " + std::to_string(agent_index) + " out of range");
    }
    const GridShape& g = scenario.grid;
    if (g.channels < 7) {
        throw ConfigError("encode needs at least 7 channels (occupancy + box regression), got " +
                          std::to_string(g.channels));
    }
    const AgentPose& agent = scenario.agents[static_cast<std::size_t>(agent_index)];
    Lcg64 noise_rng(mix_seed(scenario.rng_seed, static_cast<std::uint64_t>(agent_index), 1));
    Lcg64 tail_rng(mix_seed(scenario.rng_seed, static_cast<std::uint64_t>(agent_index), 2));

    std::vector<double> values(static_cast<std::size_t>(g.value_count()), 0.0);
    for (int h = 0; h < g.height; ++h) {
        for (int w = 0; w < g.width; ++w) {
            const std::size_t base = static_cast<std::size_t>((h * g.width + w) * g.channels);
            const double vis = visibility(agent, h, w, scenario);
            const int obj = object_at_cell(h, w, scenario);
            double ch0 = vis * (obj >= 0 ? 1.0 : 0.0);
            if (scenario.noise_amplitude > 0.0) {
                double amp = scenario.noise_amplitude;
                if (scenario.noise_distance_decay) {
                    const double dx = cell_center_x(w, g) - agent.x;
                    const double dy = cell_center_y(h, g) - agent.y;
                    const double dist = std::sqrt(dx * dx + dy * dy);
                    amp *= std::min(1.0, dist / agent.sensing_range);
                }
                ch0 += noise_rng.next_uniform(-amp, amp);
                ch0 = std::clamp(ch0, 0.0, 1.0);
            }
            values[base + 0] = ch0;
            if (vis > 0.0 && obj >= 0) {
                const WorldObject& o = scenario.objects[static_cast<std::size_t>(obj)];
                values[base + 1] = o.x - cell_center_x(w, g);
                values[base + 2] = o.y - cell_center_y(h, g);
                values[base + 3] = std::log(o.length);
                values[base + 4] = std::log(o.width);
                values[base + 5] = std::cos(o.yaw);
                values[base + 6] = std::sin(o.yaw);
            }
            for (int d = 7; d < g.channels; ++d) {
                values[base + static_cast<std::size_t>(d)] = tail_rng.next_uniform(-1.0, 1.0);
            }
        }
    }
    return FeatureMap(g, std::move(values));
}

std::vector<WorldObject> ground_truth(const Scenario& scenario) {
    std::vector<WorldObject> out;
    for (const WorldObject& o : scenario.objects) {
        if (inside_extent(o.x, o.y, scenario.grid)) out.push_back(o);
    }
    return out;
}

namespace {

using nlohmann::json;

Scenario scenario_from_json(const json& j) {
    Scenario s;
    const json& grid = j.at("grid");
    s.grid.height = grid.at("height").get<int>();
    s.grid.width = grid.at("width").get<int>();
    s.grid.channels = grid.at("channels").get<int>();
    s.grid.cell_size = grid.value("cell_size", 1.0);
    if (!j.contains("rng_seed")) {
        throw ConfigError("scenario is missing the mandatory rng_seed field");
    }
    s.rng_seed = j.at("rng_seed").get<std::uint64_t>();
    for (const json& a : j.value("agents", json::array())) {
        AgentPose p;
        p.x = a.at("x").get<double>();
        p.y = a.at("y").get<double>();
        p.yaw = wrap_angle(a.value("yaw", 0.0));
        p.sensing_range = a.at("sensing_range").get<double>();
        s.agents.push_back(p);
    }
    for (const json& o : j.value("objects", json::array())) {
        WorldObject w;
        w.id = o.at("id").get<int>();
        w.x = o.at("x").get<double>();
        w.y = o.at("y").get<double>();
        w.length = o.at("length").get<double>();
        w.width = o.at("width").get<double>();
        w.yaw = o.value("yaw", 0.0);
        s.objects.push_back(w);
    }
    for (const json& r : j.value("occluders", json::array())) {
        Occluder o;
        o.x_min = r.at("x_min").get<double>();
        o.y_min = r.at("y_min").get<double>();
        o.x_max = r.at("x_max").get<double>();
        o.y_max = r.at("y_max").get<double>();
        o.opaque = r.value("opaque", true);
        s.occluders.push_back(o);
    }
    s.noise_amplitude = j.value("noise_amplitude", 0.0);
    s.noise_distance_decay = j.value("noise_distance_decay", false);
    s.validate();
    return s;
}

json scenario_to_json(const Scenario& s) {
    json j;
    j["grid"] = {{"height", s.grid.height},
                 {"width", s.grid.width},
                 {"channels", s.grid.channels},
                 {"cell_size", s.grid.cell_size}};
    j["rng_seed"] = s.rng_seed;
    j["agents"] = json::array();
    for (const AgentPose& a : s.agents) {
        j["agents"].push_back(
            {{"x", a.x}, {"y", a.y}, {"yaw", a.yaw}, {"sensing_range", a.sensing_range}});
    }
    j["objects"] = json::array();
    for (const WorldObject& o : s.objects) {
        j["objects"].push_back({{"id", o.id},
                                {"x", o.x},
                                {"y", o.y},
                                {"length", o.length},
                                {"width", o.width},
                                {"yaw", o.yaw}});
    }
    j["occluders"] = json::array();
    for (const Occluder& r : s.occluders) {
        j["occluders"].push_back({{"x_min", r.x_min},
                                  {"y_min", r.y_min},
                                  {"x_max", r.x_max},
                                  {"y_max", r.y_max},
                                  {"opaque", r.opaque}});
    }
    j["noise_amplitude"] = s.noise_amplitude;
    j["noise_distance_decay"] = s.noise_distance_decay;
    return j;
}

}  // namespace

Scenario scenario_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("scenario JSON parse failed: ") + e.what());
    }
    try {
        return scenario_from_json(j);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("scenario JSON is malformed: ") + e.what());
    }
}

std::string scenario_to_json_text(const Scenario& scenario) {
    return scenario_to_json(scenario).dump(2) + "\n";
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open scenario file: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return scenario_from_json_text(buf.str());
}

void save_scenario(const Scenario& scenario, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write scenario file: " + path);
    }
    out << scenario_to_json_text(scenario);
}

}  // namespace bevcomm
