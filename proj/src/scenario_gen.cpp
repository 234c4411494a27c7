#include "bevcomm/scenario_gen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "bevcomm/rng.hpp"

namespace bevcomm {

namespace {

constexpr double kPi = 3.14159265358979323846;

bool point_in_rect(double x, double y, const Occluder& r) {
    return x > r.x_min && x < r.x_max && y > r.y_min && y < r.y_max;
}

// An agent sitting inside (or flush against) a wall would see nothing at
// all, so wall placement keeps a one-cell margin around every agent.
bool agent_near_rect(const AgentPose& a, const Occluder& r) {
    return a.x > r.x_min - 1.0 && a.x < r.x_max + 1.0 && a.y > r.y_min - 1.0 &&
           a.y < r.y_max + 1.0;
}

bool cell_free(const Scenario& s, double x, double y) {
    for (const Occluder& r : s.occluders) {
        if (point_in_rect(x, y, r)) return false;
    }
    for (const AgentPose& a : s.agents) {
        if (std::hypot(a.x - x, a.y - y) < 1.5) return false;
    }
    return true;
}

// Objects keep a one-cell gap between their grid cells: the decoder's 3x3
// peak test treats adjacent occupied cells as rivals, so boxes that fuse to
// different strengths would otherwise suppress each other.
bool well_separated(const std::vector<std::pair<int, int>>& taken, int h, int w) {
    for (const auto& [th, tw] : taken) {
        if (std::abs(th - h) <= 1 && std::abs(tw - w) <= 1) return false;
    }
    return true;
}

Scenario make_random(const SuiteTemplate& t, std::uint64_t seed) {
    Scenario s;
    s.grid = t.grid;
    s.rng_seed = seed;
    s.noise_amplitude = t.noise_amplitude;
    Lcg64 rng(mix_seed(seed, 0x51CE, 0));
    const double ext_x = t.grid.width * t.grid.cell_size;
    const double ext_y = t.grid.height * t.grid.cell_size;

    // Agents on a loose ring around the center so their viewpoints differ.
    for (int i = 0; i < t.agent_count; ++i) {
        const double angle =
            2.0 * kPi * (static_cast<double>(i) + rng.next_uniform(0.1, 0.4)) / t.agent_count;
        const double radius = 0.33 * std::min(ext_x, ext_y);
        AgentPose a;
        a.x = 0.5 * ext_x + radius * std::cos(angle);
        a.y = 0.5 * ext_y + radius * std::sin(angle);
        a.yaw = wrap_angle(rng.next_uniform(-kPi, kPi));
        a.sensing_range = t.sensing_range;
        s.agents.push_back(a);
    }

    // Walls: thin axis-aligned slabs that never swallow an agent.
    for (int i = 0; i < t.occluder_count; ++i) {
        for (int attempt = 0; attempt < 20; ++attempt) {
            const bool horizontal = rng.next_unit() < 0.5;
            const double cx = rng.next_uniform(6.0, ext_x - 6.0);
            const double cy = rng.next_uniform(6.0, ext_y - 6.0);
            const double half_len = 0.5 * rng.next_uniform(4.0, 8.0);
            const double half_thick = 0.5 * rng.next_uniform(0.8, 1.6);
            Occluder r;
            r.x_min = cx - (horizontal ? half_len : half_thick);
            r.x_max = cx + (horizontal ? half_len : half_thick);
            r.y_min = cy - (horizontal ? half_thick : half_len);
            r.y_max = cy + (horizontal ? half_thick : half_len);
            bool clear = true;
            for (const AgentPose& a : s.agents) {
                if (agent_near_rect(a, r)) {
                    clear = false;
                    break;
                }
            }
            if (clear) {
                s.occluders.push_back(r);
                break;
            }
        }
    }

    // Single-cell objects: snapped near cell centers with sizes small
    // enough that exactly one cell center falls inside each footprint.
    std::vector<std::pair<int, int>> taken;
    for (int i = 0; i < t.object_count; ++i) {
        for (int attempt = 0; attempt < 50; ++attempt) {
            const int h = static_cast<int>(rng.next_int(1, t.grid.height - 2));
            const int w = static_cast<int>(rng.next_int(1, t.grid.width - 2));
            if (!well_separated(taken, h, w)) continue;
            const double cx = (w + 0.5) * t.grid.cell_size + rng.next_uniform(-0.2, 0.2);
            const double cy = (h + 0.5) * t.grid.cell_size + rng.next_uniform(-0.2, 0.2);
            if (!cell_free(s, cx, cy)) continue;
            WorldObject o;
            o.id = i + 1;
            o.x = cx;
            o.y = cy;
            o.length = rng.next_uniform(1.1, 1.3);
            o.width = rng.next_uniform(1.1, 1.3);
            o.yaw = rng.next_uniform(-0.25, 0.25);
            s.objects.push_back(o);
            taken.emplace_back(h, w);
            break;
        }
    }
    if (s.objects.empty()) {
        throw ConfigError("random scenario generation produced no objects; loosen the template");
    }
    s.validate();
    return s;
}

void require_visibility(const Scenario& s, int agent, int h, int w, double expected,
                        const char* what) {
    if (visibility(s.agents[static_cast<std::size_t>(agent)], h, w, s) != expected) {
        throw ConfigError(std::string("scenario construction failed: ") + what);
    }
}

Scenario make_occlusion(const SuiteTemplate& t, std::uint64_t seed) {
    GridShape g = t.grid;
    if (g.height < 32 || g.width < 32) {
        throw ConfigError("occlusion template needs a grid of at least 32x32");
    }
    Scenario s;
    s.grid = g;
    s.rng_seed = seed;
    s.noise_amplitude = t.noise_amplitude;
    s.agents.push_back({4.5, 16.5, 0.0, t.sensing_range});
    s.agents.push_back({27.5, 16.5, 0.0, t.sensing_range});
    s.occluders.push_back({10.0, 13.0, 11.0, 20.0, true});

    // Hidden box behind the wall for agent 0, clear for agent 1; the row
    // wanders a little with the seed while staying inside the wall shadow.
    const int hidden_h = 14 + static_cast<int>(seed % 5);
    const int hidden_w = 14;
    WorldObject hidden;
    hidden.id = kHiddenObjectId;
    hidden.x = (hidden_w + 0.5) * g.cell_size;
    hidden.y = (hidden_h + 0.5) * g.cell_size;
    hidden.length = 1.4;
    hidden.width = 1.4;
    hidden.yaw = 0.0;
    s.objects.push_back(hidden);

    // Mutually visible boxes near the top and bottom edges, outside the
    // wall shadow of agent 0.
    const int mutual_cells[4][2] = {{1, 20}, {30, 22}, {2, 24}, {30, 24}};
    for (int i = 0; i < 4; ++i) {
        WorldObject o;
        o.id = i + 1;
        o.x = (mutual_cells[i][1] + 0.5) * g.cell_size;
        o.y = (mutual_cells[i][0] + 0.5) * g.cell_size;
        o.length = 1.4;
        o.width = 1.4;
        o.yaw = 0.0;
        s.objects.push_back(o);
    }
    s.validate();

    require_visibility(s, 0, hidden_h, hidden_w, 0.0, "hidden object must be occluded for agent 0");
    require_visibility(s, 1, hidden_h, hidden_w, 1.0, "hidden object must be clear for agent 1");
    for (int i = 0; i < 4; ++i) {
        require_visibility(s, 0, mutual_cells[i][0], mutual_cells[i][1], 1.0,
                           "shared object must be clear for agent 0");
        require_visibility(s, 1, mutual_cells[i][0], mutual_cells[i][1], 1.0,
                           "shared object must be clear for agent 1");
    }
    return s;
}

Scenario make_request_benefit(const SuiteTemplate& t, std::uint64_t seed) {
    GridShape g = t.grid;
    if (g.height < 32 || g.width < 32) {
        throw ConfigError("request-benefit template needs a grid of at least 32x32");
    }
    Scenario s;
    s.grid = g;
    s.rng_seed = seed;
    s.noise_amplitude = t.noise_amplitude;
    s.agents.push_back({16.5, 2.5, 0.0, t.sensing_range});   // sees everything
    s.agents.push_back({16.5, 30.5, 0.0, t.sensing_range});  // blocked from the hidden box

    const int hidden_h = 26;
    const int hidden_w = 12 + static_cast<int>(seed % 9);
    const double hx = (hidden_w + 0.5) * g.cell_size;
    const double hy = (hidden_h + 0.5) * g.cell_size;

    // Wall sized to cover the sight line from agent 1 to the hidden box
    // where that line crosses the wall's y-band.
    const AgentPose& a1 = s.agents[1];
    const double y_lo = 28.0;
    const double y_hi = 28.9;
    const double t_lo = (a1.y - y_hi) / (a1.y - hy);
    const double t_hi = (a1.y - y_lo) / (a1.y - hy);
    const double x_at_lo = a1.x + t_lo * (hx - a1.x);
    const double x_at_hi = a1.x + t_hi * (hx - a1.x);
    Occluder wall;
    wall.x_min = std::min(x_at_lo, x_at_hi) - 0.4;
    wall.x_max = std::max(x_at_lo, x_at_hi) + 0.4;
    wall.y_min = y_lo;
    wall.y_max = y_hi;
    s.occluders.push_back(wall);

    WorldObject hidden;
    hidden.id = kHiddenObjectId;
    hidden.x = hx;
    hidden.y = hy;
    hidden.length = 1.4;
    hidden.width = 1.4;
    hidden.yaw = 0.0;
    s.objects.push_back(hidden);
    s.validate();

    // Decoys live in the top rows, so every decoy's flat index precedes the
    // hidden box's; only cells both agents can see qualify.
    std::vector<std::pair<int, int>> candidates;
    for (int h = 2; h <= 10; ++h) {
        for (int w = 2; w <= g.width - 3; ++w) {
            if (visibility(s.agents[0], h, w, s) == 1.0 && visibility(s.agents[1], h, w, s) == 1.0) {
                candidates.emplace_back(h, w);
            }
        }
    }
    if (static_cast<int>(candidates.size()) < t.decoy_count) {
        throw ConfigError("request-benefit template cannot place " +
                          std::to_string(t.decoy_count) + " mutually visible decoys");
    }
    Lcg64 rng(mix_seed(seed, 0xDEC0, 0));
    for (int i = static_cast<int>(candidates.size()) - 1; i > 0; --i) {
        const int j = static_cast<int>(rng.next_int(0, i));
        std::swap(candidates[static_cast<std::size_t>(i)], candidates[static_cast<std::size_t>(j)]);
    }
    std::vector<std::pair<int, int>> taken{{hidden_h, hidden_w}};
    int placed = 0;
    for (const auto& [h, w] : candidates) {
        if (placed == t.decoy_count) break;
        if (!well_separated(taken, h, w)) continue;
        WorldObject o;
        o.id = placed + 1;
        o.x = (w + 0.5) * g.cell_size;
        o.y = (h + 0.5) * g.cell_size;
        o.length = 1.4;
        o.width = 1.4;
        o.yaw = 0.0;
        s.objects.push_back(o);
        taken.emplace_back(h, w);
        ++placed;
    }
    if (placed < t.decoy_count) {
        throw ConfigError("request-benefit template cannot place " +
                          std::to_string(t.decoy_count) + " separated decoys");
    }
    s.validate();

    require_visibility(s, 0, hidden_h, hidden_w, 1.0, "hidden object must be clear for agent 0");
    require_visibility(s, 1, hidden_h, hidden_w, 0.0, "hidden object must be occluded for agent 1");
    return s;
}

using nlohmann::json;

SuiteKind kind_from_string(const std::string& name) {
    if (name == "random") return SuiteKind::kRandom;
    if (name == "occlusion") return SuiteKind::kOcclusion;
    if (name == "request_benefit") return SuiteKind::kRequestBenefit;
    throw ConfigError("unknown suite kind: " + name);
}

std::string kind_to_string(SuiteKind kind) {
    switch (kind) {
        case SuiteKind::kRandom:
            return "random";
        case SuiteKind::kOcclusion:
            return "occlusion";
        case SuiteKind::kRequestBenefit:
            return "request_benefit";
    }
    return "random";
}

}  // namespace

Scenario make_scenario(const SuiteTemplate& t, std::uint64_t seed) {
    t.grid.validate();
    switch (t.kind) {
        case SuiteKind::kRandom:
            return make_random(t, seed);
        case SuiteKind::kOcclusion:
            return make_occlusion(t, seed);
        case SuiteKind::kRequestBenefit:
            return make_request_benefit(t, seed);
    }
    throw ConfigError("unknown suite kind");
}

SuiteTemplate suite_template_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("suite template JSON parse failed: ") + e.what());
    }
    SuiteTemplate t;
    try {
        t.kind = kind_from_string(j.value("kind", std::string("random")));
        if (j.contains("grid")) {
            const json& grid = j.at("grid");
            t.grid.height = grid.value("height", t.grid.height);
            t.grid.width = grid.value("width", t.grid.width);
            t.grid.channels = grid.value("channels", t.grid.channels);
            t.grid.cell_size = grid.value("cell_size", t.grid.cell_size);
        }
        t.agent_count = j.value("agent_count", t.agent_count);
        t.object_count = j.value("object_count", t.object_count);
        t.occluder_count = j.value("occluder_count", t.occluder_count);
        t.sensing_range = j.value("sensing_range", t.sensing_range);
        t.noise_amplitude = j.value("noise_amplitude", t.noise_amplitude);
        t.decoy_count = j.value("decoy_count", t.decoy_count);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("suite template JSON is malformed: ") + e.what());
    }
    if (t.agent_count < 1) {
        throw ConfigError("suite template needs at least one agent");
    }
    return t;
}

std::string suite_template_to_json_text(const SuiteTemplate& t) {
    json j;
    j["kind"] = kind_to_string(t.kind);
    j["grid"] = {{"height", t.grid.height},
                 {"width", t.grid.width},
                 {"channels", t.grid.channels},
                 {"cell_size", t.grid.cell_size}};
    j["agent_count"] = t.agent_count;
    j["object_count"] = t.object_count;
    j["occluder_count"] = t.occluder_count;
    j["sensing_range"] = t.sensing_range;
    j["noise_amplitude"] = t.noise_amplitude;
    j["decoy_count"] = t.decoy_count;
    return j.dump(2) + "\n";
}

SuiteTemplate load_suite_template(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open suite template: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return suite_template_from_json_text(buf.str());
}

}  // namespace bevcomm
