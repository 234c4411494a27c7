#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "bevcomm/protocol.hpp"
#include "bevcomm/scenario_gen.hpp"

using namespace bevcomm;

namespace {

Scenario small_random_scenario(std::uint64_t seed, int agents = 2) {
    SuiteTemplate t;
    t.kind = SuiteKind::kRandom;
    t.agent_count = agents;
    return make_scenario(t, seed);
}

PipelineConfig base_config() {
    PipelineConfig cfg;
    cfg.detect.threshold = 0.2;
    return cfg;
}

}  // namespace

TEST_CASE("built-in allocation schedules") {
    ProtocolConfig p;
    p.rounds = 0;
    CHECK(p.resolved_allocation().empty());
    p.rounds = 1;
    CHECK(p.resolved_allocation() == std::vector<double>{1.0});
    p.rounds = 2;
    CHECK(p.resolved_allocation() == std::vector<double>{0.2, 0.8});
    p.rounds = 3;
    CHECK(p.resolved_allocation() == std::vector<double>{0.2, 0.6, 0.2});
    p.rounds = 4;
    CHECK(p.resolved_allocation() == std::vector<double>(4, 0.25));

    p.rounds = 2;
    p.allocation = {0.5, 0.5};
    CHECK(p.resolved_allocation() == std::vector<double>{0.5, 0.5});
}

TEST_CASE("protocol config validation") {
    ProtocolConfig p;
    p.validate();  // defaults are fine

    ProtocolConfig bad = p;
    bad.rounds = -1;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = p;
    bad.total_budget_bytes = -5;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = p;
    bad.noise_sigma = -0.1;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = p;
    bad.rounds = 2;
    bad.allocation = {1.0};
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = p;
    bad.allocation = {-0.2};
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = p;
    bad.rounds = 2;
    bad.allocation = {0.9, 0.9};
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    // Zero rounds with an empty allocation is legal: no communication.
    bad = p;
    bad.rounds = 0;
    bad.validate();
}

TEST_CASE("zero pose error warp is the identity") {
    const GridShape g{4, 4, 2, 1.0};
    std::vector<double> fv(static_cast<std::size_t>(g.value_count()));
    for (std::size_t i = 0; i < fv.size(); ++i) fv[i] = static_cast<double>(i) * 0.125;
    const FeatureMap f(g, fv);
    std::vector<double> rv(16);
    for (std::size_t i = 0; i < rv.size(); ++i) rv[i] = static_cast<double>(i) / 16.0;
    const ScalarMap r(g, rv);

    const WarpedMaps out = warp_received(f, r, PoseError{});
    CHECK(out.features == f);
    CHECK(out.request == r);
}

TEST_CASE("one-cell translation shifts the maps and fills the exposed edge") {
    const GridShape g{4, 4, 2, 1.0};
    std::vector<double> fv(static_cast<std::size_t>(g.value_count()));
    for (int i = 0; i < g.cell_count(); ++i) {
        fv[static_cast<std::size_t>(2 * i)] = static_cast<double>(i);
        fv[static_cast<std::size_t>(2 * i + 1)] = static_cast<double>(i) + 0.5;
    }
    const FeatureMap f(g, fv);
    std::vector<double> rv(16);
    for (std::size_t i = 0; i < rv.size(); ++i) rv[i] = static_cast<double>(i) / 16.0;
    const ScalarMap r(g, rv);

    // dx = +1 cell: destination (h, w) reads source (h, w-1).
    const WarpedMaps out = warp_received(f, r, PoseError{1.0, 0.0, 0.0});
    for (int h = 0; h < 4; ++h) {
        // Column 0 has no source: zero features, fully-unknown request.
        CHECK(out.features.at(h, 0, 0) == 0.0);
        CHECK(out.features.at(h, 0, 1) == 0.0);
        CHECK(out.request.at(h, 0) == 1.0);
        for (int w = 1; w < 4; ++w) {
            const int src = h * 4 + (w - 1);
            CHECK(out.features.at(h, w, 0) == static_cast<double>(src));
            CHECK(out.features.at(h, w, 1) == static_cast<double>(src) + 0.5);
            CHECK(out.request.at(h, w) == static_cast<double>(src) / 16.0);
        }
    }
}

TEST_CASE("half-turn rotation reads the point-reflected cell") {
    const GridShape g{4, 4, 1, 1.0};
    std::vector<double> fv(16);
    for (std::size_t i = 0; i < fv.size(); ++i) fv[i] = static_cast<double>(i);
    const FeatureMap f(g, fv);
    const ScalarMap r = ScalarMap::constant(g, 0.25);

    const WarpedMaps out = warp_received(f, r, PoseError{0.0, 0.0, 3.14159265358979323846});
    for (int h = 0; h < 4; ++h) {
        for (int w = 0; w < 4; ++w) {
            CHECK(out.features.at(h, w, 0) == static_cast<double>((3 - h) * 4 + (3 - w)));
            CHECK(out.request.at(h, w) == 0.25);
        }
    }
}

TEST_CASE("warp validates the plane") {
    const GridShape g{4, 4, 1, 1.0};
    const GridShape other{4, 5, 1, 1.0};
    CHECK_THROWS_AS(
        warp_received(FeatureMap::zeros(g), ScalarMap::constant(other, 0.5), PoseError{1, 0, 0}),
        DimensionError);
}

TEST_CASE("zero budget degrades exactly to single-agent perception") {
    const Scenario sc = small_random_scenario(42, 3);
    PipelineConfig solo = base_config();
    solo.protocol.rounds = 0;
    PipelineConfig muted = base_config();
    muted.protocol.rounds = 1;
    muted.protocol.total_budget_bytes = 0;

    const ExperimentResult a = run_experiment(sc, solo);
    const ExperimentResult b = run_experiment(sc, muted);

    CHECK(b.point.feature_bytes == 0);
    CHECK(b.point.volume_log2 == 0.0);
    CHECK(b.point.mean_ap50 == a.point.mean_ap50);
    CHECK(b.point.mean_ap70 == a.point.mean_ap70);
    CHECK(b.final_agent_ap50 == a.final_agent_ap50);
    // The muted run still has a pre-round and post-round stage; both equal
    // the solo AP because no payload cells moved.
    REQUIRE(b.point.round_ap50.size() == 2);
    CHECK(b.point.round_ap50[0] == a.point.round_ap50[0]);
    CHECK(b.point.round_ap50[1] == a.point.round_ap50[0]);
    // Round-0 messages still circulate request maps even when silent.
    REQUIRE(b.rounds.size() == 1);
    CHECK(b.rounds[0].feature_bytes == 0);
    CHECK(b.rounds[0].request_bytes > 0);
}

TEST_CASE("round budgets follow the allocation and links split evenly") {
    const Scenario sc = small_random_scenario(7, 3);
    PipelineConfig cfg = base_config();
    cfg.protocol.rounds = 2;
    cfg.protocol.total_budget_bytes = 10000;
    cfg.protocol.allocation = {0.2, 0.8};

    const ExperimentResult r = run_experiment(sc, cfg);
    REQUIRE(r.rounds.size() == 2);
    CHECK(r.rounds[0].round == 0);
    CHECK(r.rounds[1].round == 1);
    CHECK(r.rounds[0].budget_bytes == 2000);
    CHECK(r.rounds[1].budget_bytes == 8000);
    // Opening round is fully connected for three agents.
    CHECK(r.rounds[0].edges == 6);

    std::int64_t total_feature = 0;
    for (const RoundLog& round : r.rounds) {
        CHECK(round.feature_bytes <= round.budget_bytes);
        const std::int64_t link_share = round.budget_bytes / 6;  // 3 agents
        for (const LinkLog& link : round.links) {
            CHECK(link.feature_bytes <= link_share);
            CHECK(link.cells * sc.grid.channels * 4 == link.feature_bytes);
        }
        total_feature += round.feature_bytes;
    }
    CHECK(r.point.feature_bytes == total_feature);
    CHECK(r.point.feature_bytes <= cfg.protocol.total_budget_bytes);
    if (r.point.feature_bytes > 0) {
        CHECK(r.point.volume_log2 ==
              doctest::Approx(std::log2(static_cast<double>(r.point.feature_bytes)))
                  .epsilon(1e-12));
    }
    // Stage APs: pre-round plus one entry per round.
    CHECK(r.point.round_ap50.size() == 3);
    CHECK(r.point.mean_ap50 == r.point.round_ap50.back());
}

TEST_CASE("a second round with zero allocation changes nothing") {
    const Scenario sc = small_random_scenario(11, 2);
    PipelineConfig one = base_config();
    one.protocol.rounds = 1;
    one.protocol.total_budget_bytes = 4096;

    PipelineConfig two = base_config();
    two.protocol.rounds = 2;
    two.protocol.total_budget_bytes = 4096;
    two.protocol.allocation = {1.0, 0.0};

    const ExperimentResult a = run_experiment(sc, one);
    const ExperimentResult b = run_experiment(sc, two);

    CHECK(b.point.feature_bytes == a.point.feature_bytes);
    CHECK(b.point.request_bytes == a.point.request_bytes);
    CHECK(b.point.mean_ap50 == a.point.mean_ap50);
    CHECK(b.point.mean_ap70 == a.point.mean_ap70);
    CHECK(b.final_agent_ap50 == a.final_agent_ap50);
    REQUIRE(b.point.round_ap50.size() == 3);
    CHECK(b.point.round_ap50[1] == a.point.round_ap50[1]);
    // The empty round moved nothing and left the maps alone.
    CHECK(b.point.round_ap50[2] == b.point.round_ap50[1]);
    CHECK(b.rounds[1].feature_bytes == 0);
    CHECK(b.rounds[1].request_bytes == 0);
    CHECK(b.rounds[1].edges == 0);
}

TEST_CASE("experiments reproduce bit-for-bit") {
    const Scenario sc = small_random_scenario(99, 3);
    PipelineConfig cfg = base_config();
    cfg.protocol.rounds = 2;
    cfg.protocol.total_budget_bytes = 8192;
    cfg.protocol.noise_sigma = 0.5;

    const ExperimentResult a = run_experiment(sc, cfg);
    const ExperimentResult b = run_experiment(sc, cfg);
    CHECK(a.point.feature_bytes == b.point.feature_bytes);
    CHECK(a.point.request_bytes == b.point.request_bytes);
    CHECK(a.point.volume_log2 == b.point.volume_log2);
    CHECK(a.point.mean_ap50 == b.point.mean_ap50);
    CHECK(a.point.mean_ap70 == b.point.mean_ap70);
    CHECK(a.point.round_ap50 == b.point.round_ap50);
    CHECK(a.point.round_ap70 == b.point.round_ap70);
    CHECK(a.final_agent_ap50 == b.final_agent_ap50);
    REQUIRE(a.rounds.size() == b.rounds.size());
    for (std::size_t k = 0; k < a.rounds.size(); ++k) {
        CHECK(a.rounds[k].feature_bytes == b.rounds[k].feature_bytes);
        CHECK(a.rounds[k].request_bytes == b.rounds[k].request_bytes);
        CHECK(a.rounds[k].edges == b.rounds[k].edges);
        REQUIRE(a.rounds[k].links.size() == b.rounds[k].links.size());
        for (std::size_t l = 0; l < a.rounds[k].links.size(); ++l) {
            CHECK(a.rounds[k].links[l].cells == b.rounds[k].links[l].cells);
            CHECK(a.rounds[k].links[l].volume_log2 == b.rounds[k].links[l].volume_log2);
        }
    }
}

TEST_CASE("later rounds demand the stored request maps") {
    const Scenario sc = small_random_scenario(3, 2);
    PipelineConfig cfg = base_config();
    const FusionParams params = make_fusion_params(cfg.fusion, sc.grid.channels);

    std::vector<AgentState> states;
    for (int i = 0; i < 2; ++i) {
        FeatureMap f = encode(i, sc);
        ScalarMap c = generate_confidence(f, cfg.generator);
        states.push_back(AgentState{std::move(f), std::move(c), {}, PoseError{}});
    }
    // No round 0 has run, so nobody holds a peer request map yet.
    CHECK_THROWS_AS(run_round(states, sc, cfg, params, 1, 4096), ProtocolError);
    CHECK_THROWS_AS(run_round(states, sc, cfg, params, 0, -1), ProtocolError);

    // After an opening round the stored requests make round 1 legal.
    run_round(states, sc, cfg, params, 0, 4096);
    const RoundLog log = run_round(states, sc, cfg, params, 1, 4096);
    CHECK(log.round == 1);
}

TEST_CASE("fusion settings translate into parameter sets") {
    FusionSettings s;
    s.identity_mode = true;
    s.pairwise_softmax = true;
    const FusionParams ident = make_fusion_params(s, 8);
    CHECK(ident.identity_mode);
    CHECK(ident.heads == 1);
    CHECK(ident.pairwise_softmax);

    s.identity_mode = false;
    s.heads = 4;
    s.rng_seed = 123;
    const FusionParams seeded = make_fusion_params(s, 8);
    CHECK_FALSE(seeded.identity_mode);
    CHECK(seeded.heads == 4);
    CHECK(seeded.channels == 8);
    CHECK(seeded.pairwise_softmax);
    seeded.validate(8);
}
