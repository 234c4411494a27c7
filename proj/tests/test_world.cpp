#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <string>

#include "bevcomm/rng.hpp"
#include "bevcomm/world.hpp"

using namespace bevcomm;

namespace {

Scenario small_world() {
    Scenario s;
    s.grid = {8, 8, 7, 1.0};
    s.agents.push_back({0.5, 0.5, 0.0, 20.0});
    s.rng_seed = 5;
    return s;
}

// Sampling oracle: walk the segment densely and report whether any sampled
// point lies strictly inside the rectangle. One-sided: a hit proves the
// segment crosses the open interior.
bool sampled_interior_hit(double x0, double y0, double x1, double y1, const Occluder& r) {
    for (int i = 1; i < 4096; ++i) {
        const double t = static_cast<double>(i) / 4096.0;
        const double x = x0 + t * (x1 - x0);
        const double y = y0 + t * (y1 - y0);
        if (x > r.x_min && x < r.x_max && y > r.y_min && y < r.y_max) return true;
    }
    return false;
}

}  // namespace

TEST_CASE("segment-rectangle crossing hand cases") {
    const Occluder r{2.0, 2.0, 4.0, 4.0, true};
    CHECK(segment_crosses_rect(0, 3, 6, 3, r));        // straight through
    CHECK(segment_crosses_rect(3, 3, 9, 9, r));        // starts inside
    CHECK_FALSE(segment_crosses_rect(0, 0, 1, 6, r));  // passes left of it
    CHECK_FALSE(segment_crosses_rect(0, 2, 6, 2, r));  // grazes the bottom edge only
    CHECK_FALSE(segment_crosses_rect(0, 4, 6, 4, r));  // grazes the top edge only
    CHECK_FALSE(segment_crosses_rect(1, 3, 3, 1, r));  // touches the corner point only
    CHECK(segment_crosses_rect(1.5, 3.5, 3.5, 1.5, r));  // cuts through the corner region
}

TEST_CASE("segment-rectangle crossing agrees with a sampling oracle") {
    Lcg64 rng(mix_seed(99, 1, 2));
    int hits = 0;
    for (int i = 0; i < 500; ++i) {
        const double x0 = rng.next_uniform(0, 10), y0 = rng.next_uniform(0, 10);
        const double x1 = rng.next_uniform(0, 10), y1 = rng.next_uniform(0, 10);
        const double rx = rng.next_uniform(0, 8), ry = rng.next_uniform(0, 8);
        const Occluder r{rx, ry, rx + rng.next_uniform(0.5, 2.0), ry + rng.next_uniform(0.5, 2.0),
                         true};
        if (sampled_interior_hit(x0, y0, x1, y1, r)) {
            ++hits;
            CHECK(segment_crosses_rect(x0, y0, x1, y1, r));
        }
    }
    CHECK(hits > 50);  // the draw actually exercises the crossing branch
}

TEST_CASE("visibility: range cutoff and occlusion") {
    Scenario s = small_world();
    CHECK(visibility(s.agents[0], 0, 0, s) == 1.0);
    CHECK(visibility(s.agents[0], 7, 7, s) == 1.0);

    s.agents[0].sensing_range = 3.0;
    CHECK(visibility(s.agents[0], 7, 7, s) == 0.0);  // ~9.9 away
    s.agents[0].sensing_range = 20.0;

    // Wall strictly between the agent and the far corner.
    s.occluders.push_back({3.0, 3.0, 5.0, 5.0, true});
    CHECK(visibility(s.agents[0], 7, 7, s) == 0.0);
    CHECK(visibility(s.agents[0], 0, 7, s) == 1.0);  // around the wall

    // Transparent rectangles block nothing.
    s.occluders[0].opaque = false;
    CHECK(visibility(s.agents[0], 7, 7, s) == 1.0);
}

TEST_CASE("encode: empty world with zero noise is all zero") {
    const Scenario s = small_world();
    const FeatureMap f = encode(0, s);
    for (double v : f.values()) CHECK(v == 0.0);
}

TEST_CASE("encode: one visible object fills its cell") {
    Scenario s = small_world();
    s.objects.push_back({7, 5.5, 6.5, 1.2, 1.2, 0.0});  // cell h=6, w=5
    const FeatureMap f = encode(0, s);
    CHECK(f.at(6, 5, 0) == 1.0);
    CHECK(f.at(6, 5, 1) == 0.0);  // centered exactly
    CHECK(f.at(6, 5, 2) == 0.0);
    CHECK(f.at(6, 5, 3) == doctest::Approx(std::log(1.2)).epsilon(1e-12));
    CHECK(f.at(6, 5, 4) == doctest::Approx(std::log(1.2)).epsilon(1e-12));
    CHECK(f.at(6, 5, 5) == 1.0);  // cos 0
    CHECK(f.at(6, 5, 6) == 0.0);  // sin 0
    CHECK(f.at(6, 6, 0) == 0.0);  // neighbors untouched
}

TEST_CASE("encode: occluded object is written for the clear agent only") {
    Scenario s = small_world();
    s.agents.push_back({7.5, 0.5, 0.0, 20.0});
    s.occluders.push_back({1.0, 2.8, 5.5, 3.2, true});
    s.objects.push_back({1, 3.5, 6.5, 1.2, 1.2, 0.0});  // behind the slab for agent 0
    REQUIRE(visibility(s.agents[0], 6, 3, s) == 0.0);
    REQUIRE(visibility(s.agents[1], 6, 3, s) == 1.0);
    CHECK(encode(0, s).at(6, 3, 0) == 0.0);
    CHECK(encode(1, s).at(6, 3, 0) == 1.0);
}

TEST_CASE("encode: deterministic per (scenario, agent) and needs 7 channels") {
    Scenario s = small_world();
    s.noise_amplitude = 0.25;
    s.objects.push_back({1, 3.5, 3.5, 1.2, 1.2, 0.3});
    CHECK(encode(0, s) == encode(0, s));

    s.grid.channels = 6;
    CHECK_THROWS_AS(encode(0, s), ConfigError);
}

TEST_CASE("encode: noise stays within amplitude and clamps channel 0") {
    Scenario s = small_world();
    s.grid.channels = 9;
    s.noise_amplitude = 0.25;
    const FeatureMap f = encode(0, s);
    bool nonzero_noise = false;
    for (int h = 0; h < 8; ++h) {
        for (int w = 0; w < 8; ++w) {
            CHECK(f.at(h, w, 0) >= 0.0);
            CHECK(f.at(h, w, 0) <= 0.25 + 1e-12);
            if (f.at(h, w, 0) != 0.0) nonzero_noise = true;
            CHECK(f.at(h, w, 7) >= -1.0);
            CHECK(f.at(h, w, 7) <= 1.0);
            CHECK(f.at(h, w, 8) >= -1.0);
            CHECK(f.at(h, w, 8) <= 1.0);
        }
    }
    CHECK(nonzero_noise);
}

TEST_CASE("ground truth lists every in-extent object regardless of view") {
    Scenario s = small_world();
    s.occluders.push_back({2.0, 2.0, 6.0, 6.0, true});
    s.objects.push_back({1, 4.0, 4.0, 1.0, 1.0, 0.0});
    s.objects.push_back({2, 1.0, 7.0, 1.0, 1.0, 0.0});
    s.objects.push_back({3, 7.0, 1.0, 1.0, 1.0, 0.0});
    s.objects.push_back({4, 42.0, 4.0, 1.0, 1.0, 0.0});  // out of extent
    const auto truth = ground_truth(s);
    REQUIRE(truth.size() == 3);
    CHECK(truth[0].id == 1);
    CHECK(truth[1].id == 2);
    CHECK(truth[2].id == 3);
}

TEST_CASE("wrap_angle lands in [-pi, pi)") {
    const double pi = 3.14159265358979323846;
    CHECK(wrap_angle(0.0) == 0.0);
    CHECK(wrap_angle(pi) == doctest::Approx(-pi));
    CHECK(wrap_angle(-pi) == doctest::Approx(-pi));
    CHECK(wrap_angle(2.5 * pi) == doctest::Approx(0.5 * pi));
    CHECK(wrap_angle(-2.5 * pi) == doctest::Approx(-0.5 * pi));
}

TEST_CASE("scenario JSON round-trips and requires a seed") {
    Scenario s = small_world();
    s.noise_amplitude = 0.1;
    s.noise_distance_decay = true;
    s.objects.push_back({1, 3.25, 4.75, 1.2, 1.1, 0.37});
    s.occluders.push_back({1.0, 2.0, 3.0, 2.5, true});

    const std::string text = scenario_to_json_text(s);
    const Scenario back = scenario_from_json_text(text);
    CHECK(scenario_to_json_text(back) == text);

    CHECK_THROWS_AS(scenario_from_json_text("{\"grid\":{\"height\":4,\"width\":4,\"channels\":7}}"),
                    ConfigError);
    CHECK_THROWS_AS(scenario_from_json_text("not json"), ConfigError);
    CHECK_THROWS_AS(load_scenario("/nonexistent/path/scn.json"), IoError);
}
