#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bevcomm/config.hpp"
#include "bevcomm/errors.hpp"
#include "bevcomm/scenario_gen.hpp"
#include "bevcomm/sweeps.hpp"
#include "bevcomm/world.hpp"

namespace {

using namespace bevcomm;

SuiteKind parse_kind(const std::string& s) {
    if (s == "random") return SuiteKind::kRandom;
    if (s == "occlusion") return SuiteKind::kOcclusion;
    if (s == "request_benefit") return SuiteKind::kRequestBenefit;
    throw ConfigError("unknown suite kind '" + s +
                      "' (expected random, occlusion or request_benefit)");
}

// "0.2:0.8" -> {0.2, 0.8}; "default" -> {} (built-in schedule).
std::vector<double> parse_schedule(const std::string& s) {
    if (s == "default") return {};
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ':')) {
        try {
            out.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw ConfigError("bad allocation fraction '" + tok + "' in schedule '" + s + "'");
        }
    }
    if (out.empty()) throw ConfigError("empty allocation schedule '" + s + "'");
    return out;
}

// Empty path means stdout.
void emit(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
    } else {
        write_text_file(path, text);
    }
}

ExperimentConfig base_config(const std::string& config_path) {
    if (config_path.empty()) return ExperimentConfig{};
    return load_config(config_path);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"deterministic multi-agent perception experiments"};
    app.require_subcommand(1);

    // --- gen-scenarios ---------------------------------------------------
    auto* gen = app.add_subcommand("gen-scenarios", "write a seeded scenario family to disk");
    std::string gen_template;
    std::string gen_kind;
    std::string gen_out_dir;
    int gen_count = 1;
    std::uint64_t gen_seed = 1;
    gen->add_option("--template", gen_template, "suite template JSON file");
    auto* gen_kind_opt =
        gen->add_option("--kind", gen_kind, "random | occlusion | request_benefit");
    gen->add_option("--count", gen_count, "number of scenarios to write");
    gen->add_option("--seed", gen_seed, "seed of the first scenario");
    gen->add_option("--out-dir", gen_out_dir, "output directory")->required();
    gen->callback([&]() {
        SuiteTemplate t;
        if (!gen_template.empty()) t = load_suite_template(gen_template);
        if (gen_kind_opt->count() > 0) t.kind = parse_kind(gen_kind);
        const std::vector<std::string> paths =
            generate_scenarios(t, gen_count, gen_seed, gen_out_dir);
        for (const std::string& p : paths) std::cout << p << "\n";
    });

    // --- sweep-bandwidth -------------------------------------------------
    auto* bw = app.add_subcommand("sweep-bandwidth",
                                  "detection quality vs byte budget, one CSV row per (seed, budget)");
    std::string bw_config;
    std::string bw_kind;
    std::string bw_out;
    std::vector<std::int64_t> bw_budgets;
    std::vector<double> bw_fracs;
    std::vector<std::uint64_t> bw_seeds;
    std::uint64_t bw_base_seed = 1;
    int bw_seed_count = 20;
    int bw_rounds = 1;
    bw->add_option("--config", bw_config, "experiment config JSON (flags override)");
    auto* bw_kind_opt = bw->add_option("--kind", bw_kind, "suite kind override");
    auto* bw_budgets_opt = bw->add_option("--budgets", bw_budgets, "byte budgets");
    auto* bw_fracs_opt =
        bw->add_option("--budget-fracs", bw_fracs, "budgets as fractions of the dense total");
    auto* bw_seeds_opt = bw->add_option("--seeds", bw_seeds, "explicit scenario seeds");
    auto* bw_base_opt = bw->add_option("--base-seed", bw_base_seed, "first scenario seed");
    auto* bw_count_opt = bw->add_option("--seed-count", bw_seed_count, "number of seeds");
    auto* bw_rounds_opt = bw->add_option("--rounds", bw_rounds, "exchange rounds per run");
    auto* bw_out_opt = bw->add_option("--out", bw_out, "CSV output path (default stdout)");
    bw->callback([&]() {
        ExperimentConfig cfg = base_config(bw_config);
        if (bw_kind_opt->count() > 0) cfg.suite.kind = parse_kind(bw_kind);
        if (bw_budgets_opt->count() > 0 || bw_fracs_opt->count() > 0) {
            cfg.budgets_bytes = bw_budgets_opt->count() > 0 ? bw_budgets
                                                            : std::vector<std::int64_t>{};
            cfg.budget_fractions =
                bw_fracs_opt->count() > 0 ? bw_fracs : std::vector<double>{};
        }
        if (bw_seeds_opt->count() > 0) {
            cfg.seeds = bw_seeds;
        } else if (bw_base_opt->count() > 0 || bw_count_opt->count() > 0) {
            cfg.seeds.clear();
            if (bw_base_opt->count() > 0) cfg.base_seed = bw_base_seed;
            if (bw_count_opt->count() > 0) cfg.seed_count = bw_seed_count;
        }
        if (bw_rounds_opt->count() > 0) cfg.pipeline.protocol.rounds = bw_rounds;
        emit(bw_out_opt->count() > 0 ? bw_out : cfg.out_csv, sweep_bandwidth(cfg));
    });

    // --- sweep-rounds ----------------------------------------------------
    auto* rd = app.add_subcommand(
        "sweep-rounds", "round-count / allocation comparison at a fixed total budget");
    std::string rd_config;
    std::string rd_kind;
    std::string rd_out;
    std::vector<int> rd_rounds;
    std::vector<std::string> rd_allocs;
    std::int64_t rd_budget = 0;
    double rd_frac = 0.0;
    std::vector<std::uint64_t> rd_seeds;
    std::uint64_t rd_base_seed = 1;
    int rd_seed_count = 20;
    rd->add_option("--config", rd_config, "experiment config JSON (flags override)");
    auto* rd_kind_opt = rd->add_option("--kind", rd_kind, "suite kind override");
    auto* rd_rounds_opt = rd->add_option("--rounds", rd_rounds, "round counts to compare");
    auto* rd_allocs_opt = rd->add_option(
        "--allocations", rd_allocs,
        "per-count schedules like 0.2:0.8, or 'default'; pairs with --rounds");
    auto* rd_budget_opt = rd->add_option("--budget", rd_budget, "total byte budget");
    auto* rd_frac_opt =
        rd->add_option("--budget-frac", rd_frac, "budget as a fraction of the dense total");
    auto* rd_seeds_opt = rd->add_option("--seeds", rd_seeds, "explicit scenario seeds");
    auto* rd_base_opt = rd->add_option("--base-seed", rd_base_seed, "first scenario seed");
    auto* rd_count_opt = rd->add_option("--seed-count", rd_seed_count, "number of seeds");
    auto* rd_out_opt = rd->add_option("--out", rd_out, "CSV output path (default stdout)");
    rd->callback([&]() {
        ExperimentConfig cfg = base_config(rd_config);
        if (rd_kind_opt->count() > 0) cfg.suite.kind = parse_kind(rd_kind);
        if (rd_rounds_opt->count() > 0) cfg.round_counts = rd_rounds;
        if (rd_allocs_opt->count() > 0) {
            cfg.allocations.clear();
            for (const std::string& s : rd_allocs) cfg.allocations.push_back(parse_schedule(s));
        }
        if (rd_budget_opt->count() > 0 || rd_frac_opt->count() > 0) {
            cfg.budgets_bytes = rd_budget_opt->count() > 0
                                    ? std::vector<std::int64_t>{rd_budget}
                                    : std::vector<std::int64_t>{};
            cfg.budget_fractions =
                rd_frac_opt->count() > 0 ? std::vector<double>{rd_frac} : std::vector<double>{};
        }
        if (rd_seeds_opt->count() > 0) {
            cfg.seeds = rd_seeds;
        } else if (rd_base_opt->count() > 0 || rd_count_opt->count() > 0) {
            cfg.seeds.clear();
            if (rd_base_opt->count() > 0) cfg.base_seed = rd_base_seed;
            if (rd_count_opt->count() > 0) cfg.seed_count = rd_seed_count;
        }
        emit(rd_out_opt->count() > 0 ? rd_out : cfg.out_csv, sweep_rounds(cfg));
    });

    // --- sweep-noise -----------------------------------------------------
    auto* nz = app.add_subcommand("sweep-noise",
                                  "pose-noise robustness vs a no-communication baseline");
    std::string nz_config;
    std::string nz_kind;
    std::string nz_out;
    std::vector<double> nz_sigmas;
    std::int64_t nz_budget = 0;
    double nz_frac = 0.0;
    std::vector<std::uint64_t> nz_seeds;
    std::uint64_t nz_base_seed = 1;
    int nz_seed_count = 20;
    int nz_rounds = 1;
    nz->add_option("--config", nz_config, "experiment config JSON (flags override)");
    auto* nz_kind_opt = nz->add_option("--kind", nz_kind, "suite kind override");
    auto* nz_sigmas_opt =
        nz->add_option("--sigmas", nz_sigmas, "pose error standard deviations (meters)");
    auto* nz_budget_opt = nz->add_option("--budget", nz_budget, "total byte budget");
    auto* nz_frac_opt =
        nz->add_option("--budget-frac", nz_frac, "budget as a fraction of the dense total");
    auto* nz_seeds_opt = nz->add_option("--seeds", nz_seeds, "explicit scenario seeds");
    auto* nz_base_opt = nz->add_option("--base-seed", nz_base_seed, "first scenario seed");
    auto* nz_count_opt = nz->add_option("--seed-count", nz_seed_count, "number of seeds");
    auto* nz_rounds_opt = nz->add_option("--rounds", nz_rounds, "exchange rounds per run");
    auto* nz_out_opt = nz->add_option("--out", nz_out, "CSV output path (default stdout)");
    nz->callback([&]() {
        ExperimentConfig cfg = base_config(nz_config);
        if (nz_kind_opt->count() > 0) cfg.suite.kind = parse_kind(nz_kind);
        if (nz_sigmas_opt->count() > 0) cfg.sigmas = nz_sigmas;
        if (nz_budget_opt->count() > 0 || nz_frac_opt->count() > 0) {
            cfg.budgets_bytes = nz_budget_opt->count() > 0
                                    ? std::vector<std::int64_t>{nz_budget}
                                    : std::vector<std::int64_t>{};
            cfg.budget_fractions =
                nz_frac_opt->count() > 0 ? std::vector<double>{nz_frac} : std::vector<double>{};
        }
        if (nz_seeds_opt->count() > 0) {
            cfg.seeds = nz_seeds;
        } else if (nz_base_opt->count() > 0 || nz_count_opt->count() > 0) {
            cfg.seeds.clear();
            if (nz_base_opt->count() > 0) cfg.base_seed = nz_base_seed;
            if (nz_count_opt->count() > 0) cfg.seed_count = nz_seed_count;
        }
        if (nz_rounds_opt->count() > 0) cfg.pipeline.protocol.rounds = nz_rounds;
        emit(nz_out_opt->count() > 0 ? nz_out : cfg.out_csv, sweep_noise(cfg));
    });

    // --- run-one ---------------------------------------------------------
    auto* ro = app.add_subcommand("run-one",
                                  "run one scenario and dump the full JSON-lines exchange log");
    std::string ro_config;
    std::string ro_scenario;
    std::string ro_out;
    std::string ro_alloc;
    std::int64_t ro_budget = 0;
    int ro_rounds = 1;
    double ro_sigma = 0.0;
    ro->add_option("--config", ro_config, "experiment config JSON (flags override)");
    auto* ro_scn_opt = ro->add_option("--scenario", ro_scenario, "scenario JSON file");
    auto* ro_budget_opt = ro->add_option("--budget", ro_budget, "total byte budget");
    auto* ro_rounds_opt = ro->add_option("--rounds", ro_rounds, "exchange rounds");
    auto* ro_sigma_opt = ro->add_option("--sigma", ro_sigma, "pose error std (meters)");
    auto* ro_alloc_opt =
        ro->add_option("--allocation", ro_alloc, "budget schedule like 0.2:0.8 or 'default'");
    auto* ro_out_opt = ro->add_option("--out-log", ro_out, "log output path (default stdout)");
    ro->callback([&]() {
        ExperimentConfig cfg = base_config(ro_config);
        if (ro_scn_opt->count() > 0) cfg.scenario_path = ro_scenario;
        if (cfg.scenario_path.empty()) {
            throw ConfigError("run-one needs --scenario or a scenario path in the config");
        }
        if (ro_budget_opt->count() > 0) cfg.pipeline.protocol.total_budget_bytes = ro_budget;
        if (ro_rounds_opt->count() > 0) cfg.pipeline.protocol.rounds = ro_rounds;
        if (ro_sigma_opt->count() > 0) cfg.pipeline.protocol.noise_sigma = ro_sigma;
        if (ro_alloc_opt->count() > 0) cfg.pipeline.protocol.allocation = parse_schedule(ro_alloc);
        const Scenario scenario = load_scenario(cfg.scenario_path);
        emit(ro_out_opt->count() > 0 ? ro_out : cfg.out_log, run_one_log(scenario, cfg.pipeline));
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 3;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
