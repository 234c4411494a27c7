#include "bevcomm/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace bevcomm {

namespace {

using nlohmann::json;

GeneratorMode generator_mode_from_string(const std::string& name) {
    if (name == "channel0") return GeneratorMode::kChannel0;
    if (name == "linear") return GeneratorMode::kLinear;
    throw ConfigError("unknown confidence generator mode: " + name);
}

std::string generator_mode_to_string(GeneratorMode mode) {
    return mode == GeneratorMode::kChannel0 ? "channel0" : "linear";
}

}  // namespace

std::vector<std::uint64_t> ExperimentConfig::resolved_seeds() const {
    if (!seeds.empty()) return seeds;
    std::vector<std::uint64_t> out;
    out.reserve(static_cast<std::size_t>(seed_count));
    for (int i = 0; i < seed_count; ++i) out.push_back(base_seed + static_cast<std::uint64_t>(i));
    return out;
}

std::int64_t dense_feature_bytes(const GridShape& grid, int agent_count, int rounds) {
    const std::int64_t links = static_cast<std::int64_t>(agent_count) * (agent_count - 1);
    return static_cast<std::int64_t>(rounds) * links * grid.cell_count() * grid.channels * 4;
}

std::vector<std::int64_t> resolved_budgets(const ExperimentConfig& cfg) {
    std::vector<std::int64_t> out = cfg.budgets_bytes;
    if (!cfg.budget_fractions.empty()) {
        const std::int64_t dense = dense_feature_bytes(cfg.suite.grid, cfg.suite.agent_count,
                                                       std::max(1, cfg.pipeline.protocol.rounds));
        for (double f : cfg.budget_fractions) {
            if (f < 0.0) throw ConfigError("budget fractions must be non-negative");
            out.push_back(static_cast<std::int64_t>(std::floor(f * static_cast<double>(dense))));
        }
    }
    if (out.empty()) {
        throw ConfigError("bandwidth sweep needs budgets_bytes or budget_fractions");
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

ExperimentConfig config_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config JSON parse failed: ") + e.what());
    }
    ExperimentConfig cfg;
    try {
        if (j.contains("protocol")) {
            const json& p = j.at("protocol");
            cfg.pipeline.protocol.rounds = p.value("rounds", cfg.pipeline.protocol.rounds);
            cfg.pipeline.protocol.total_budget_bytes =
                p.value("total_budget_bytes", cfg.pipeline.protocol.total_budget_bytes);
            if (p.contains("allocation")) {
                cfg.pipeline.protocol.allocation = p.at("allocation").get<std::vector<double>>();
            }
            cfg.pipeline.protocol.noise_sigma =
                p.value("noise_sigma", cfg.pipeline.protocol.noise_sigma);
        }
        if (j.contains("packing")) {
            const json& p = j.at("packing");
            cfg.pipeline.packing.gaussian_enabled =
                p.value("gaussian_enabled", cfg.pipeline.packing.gaussian_enabled);
            cfg.pipeline.packing.kernel_size = p.value("kernel_size", cfg.pipeline.packing.kernel_size);
            cfg.pipeline.packing.sigma = p.value("sigma", cfg.pipeline.packing.sigma);
        }
        if (j.contains("generator")) {
            const json& p = j.at("generator");
            cfg.pipeline.generator.mode =
                generator_mode_from_string(p.value("mode", std::string("channel0")));
            if (p.contains("weights")) {
                cfg.pipeline.generator.weights = p.at("weights").get<std::vector<double>>();
            }
            cfg.pipeline.generator.bias = p.value("bias", cfg.pipeline.generator.bias);
        }
        if (j.contains("fusion")) {
            const json& p = j.at("fusion");
            cfg.pipeline.fusion.identity_mode =
                p.value("identity_mode", cfg.pipeline.fusion.identity_mode);
            cfg.pipeline.fusion.heads = p.value("heads", cfg.pipeline.fusion.heads);
            cfg.pipeline.fusion.pairwise_softmax =
                p.value("pairwise_softmax", cfg.pipeline.fusion.pairwise_softmax);
            cfg.pipeline.fusion.rng_seed = p.value("rng_seed", cfg.pipeline.fusion.rng_seed);
        }
        if (j.contains("spe")) {
            const json& p = j.at("spe");
            cfg.pipeline.spe.enabled = p.value("enabled", cfg.pipeline.spe.enabled);
            cfg.pipeline.spe.wavelength_base =
                p.value("wavelength_base", cfg.pipeline.spe.wavelength_base);
        }
        if (j.contains("detect")) {
            cfg.pipeline.detect.threshold =
                j.at("detect").value("threshold", cfg.pipeline.detect.threshold);
        }
        if (j.contains("suite")) {
            cfg.suite = suite_template_from_json_text(j.at("suite").dump());
        }
        if (j.contains("seeds")) {
            cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
        }
        cfg.base_seed = j.value("base_seed", cfg.base_seed);
        cfg.seed_count = j.value("seed_count", cfg.seed_count);
        if (j.contains("budgets_bytes")) {
            cfg.budgets_bytes = j.at("budgets_bytes").get<std::vector<std::int64_t>>();
        }
        if (j.contains("budget_fractions")) {
            cfg.budget_fractions = j.at("budget_fractions").get<std::vector<double>>();
        }
        if (j.contains("round_counts")) {
            cfg.round_counts = j.at("round_counts").get<std::vector<int>>();
        }
        if (j.contains("allocations")) {
            cfg.allocations = j.at("allocations").get<std::vector<std::vector<double>>>();
        }
        if (j.contains("sigmas")) {
            cfg.sigmas = j.at("sigmas").get<std::vector<double>>();
        }
        cfg.scenario_path = j.value("scenario", cfg.scenario_path);
        cfg.out_csv = j.value("out_csv", cfg.out_csv);
        cfg.out_log = j.value("out_log", cfg.out_log);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config JSON is malformed: ") + e.what());
    }
    if (cfg.seed_count < 1) {
        throw ConfigError("seed_count must be positive");
    }
    return cfg;
}

std::string config_to_json_text(const ExperimentConfig& cfg) {
    json j;
    j["protocol"] = {{"rounds", cfg.pipeline.protocol.rounds},
                     {"total_budget_bytes", cfg.pipeline.protocol.total_budget_bytes},
                     {"noise_sigma", cfg.pipeline.protocol.noise_sigma}};
    if (!cfg.pipeline.protocol.allocation.empty()) {
        j["protocol"]["allocation"] = cfg.pipeline.protocol.allocation;
    }
    j["packing"] = {{"gaussian_enabled", cfg.pipeline.packing.gaussian_enabled},
                    {"kernel_size", cfg.pipeline.packing.kernel_size},
                    {"sigma", cfg.pipeline.packing.sigma}};
    j["generator"] = {{"mode", generator_mode_to_string(cfg.pipeline.generator.mode)},
                      {"bias", cfg.pipeline.generator.bias}};
    if (!cfg.pipeline.generator.weights.empty()) {
        j["generator"]["weights"] = cfg.pipeline.generator.weights;
    }
    j["fusion"] = {{"identity_mode", cfg.pipeline.fusion.identity_mode},
                   {"heads", cfg.pipeline.fusion.heads},
                   {"pairwise_softmax", cfg.pipeline.fusion.pairwise_softmax},
                   {"rng_seed", cfg.pipeline.fusion.rng_seed}};
    j["spe"] = {{"enabled", cfg.pipeline.spe.enabled},
                {"wavelength_base", cfg.pipeline.spe.wavelength_base}};
    j["detect"] = {{"threshold", cfg.pipeline.detect.threshold}};
    j["suite"] = json::parse(suite_template_to_json_text(cfg.suite));
    if (!cfg.seeds.empty()) j["seeds"] = cfg.seeds;
    j["base_seed"] = cfg.base_seed;
    j["seed_count"] = cfg.seed_count;
    if (!cfg.budgets_bytes.empty()) j["budgets_bytes"] = cfg.budgets_bytes;
    if (!cfg.budget_fractions.empty()) j["budget_fractions"] = cfg.budget_fractions;
    if (!cfg.round_counts.empty()) j["round_counts"] = cfg.round_counts;
    if (!cfg.allocations.empty()) j["allocations"] = cfg.allocations;
    if (!cfg.sigmas.empty()) j["sigmas"] = cfg.sigmas;
    if (!cfg.scenario_path.empty()) j["scenario"] = cfg.scenario_path;
    if (!cfg.out_csv.empty()) j["out_csv"] = cfg.out_csv;
    if (!cfg.out_log.empty()) j["out_log"] = cfg.out_log;
    return j.dump(2) + "\n";
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config file: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return config_from_json_text(buf.str());
}

}  // namespace bevcomm
