#pragma once

#include <cstdint>
#include <string>

#include "bevcomm/world.hpp"

namespace bevcomm {

// Seeded scenario families for experiments and sweeps. Every family is a
// pure function of (template, seed).

enum class SuiteKind {
    // General scenes: agents, boxy objects and opaque walls scattered so
    // each agent sees a different subset.
    kRandom,
    // Two agents; one object sits provably behind a wall for the first
    // agent and in the clear for the second. The hidden object id is
    // kHiddenObjectId.
    kOcclusion,
    // Two agents; one hidden object plus a bank of decoys that both agents
    // already see. The decoys all live at smaller flat indices than the
    // hidden object, so confidence-only packing spends its whole budget on
    // them and only request-gated packing reaches the hidden object.
    kRequestBenefit,
};

inline constexpr int kHiddenObjectId = 9000;

struct SuiteTemplate {
    SuiteKind kind = SuiteKind::kRandom;
    GridShape grid{32, 32, 8, 1.0};
    int agent_count = 2;
    int object_count = 14;
    int occluder_count = 2;
    double sensing_range = 64.0;
    double noise_amplitude = 0.0;
    // Request-benefit only: number of decoy objects in front of the hidden
    // one. Size it above the per-link cell budget of the sweep so a
    // confidence-only round cannot cover the decoys and still reach the
    // hidden object.
    int decoy_count = 24;
};

Scenario make_scenario(const SuiteTemplate& t, std::uint64_t seed);

SuiteTemplate suite_template_from_json_text(const std::string& text);
std::string suite_template_to_json_text(const SuiteTemplate& t);
SuiteTemplate load_suite_template(const std::string& path);

}  // namespace bevcomm
