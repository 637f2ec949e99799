// Command-line front end: scenario-driven experiment runner, scenario
// validation, and synthetic slot-table generation.
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dres/scenario.hpp"

namespace {

bool verbose() {
    const char* v = std::getenv("DRES_VERBOSE");
    return v != nullptr && std::string(v) != "0";
}

void log_step(const std::string& msg) {
    if (verbose()) std::cerr << "[dres] " << msg << "\n";
}

int cmd_run(const std::string& path, const std::string& study,
            const std::string& out_dir, long long seed, int trials) {
    dres::Scenario scn = dres::load_scenario(path);
    if (!study.empty()) scn.study = study;
    if (!out_dir.empty()) scn.out_dir = out_dir;
    if (seed >= 0) scn.seed = static_cast<std::uint64_t>(seed);
    if (trials > 0) scn.trials = trials;

    std::vector<dres::Table> tables;
    if (scn.study == "allocation" || scn.study == "all") {
        log_step("running allocation study");
        tables.push_back(dres::run_allocation_study(scn));
    }
    if (scn.study == "pricing" || scn.study == "all") {
        log_step("running pricing study");
        const dres::SlotTable slots =
            scn.slot_table_path
                ? dres::ingest_reference_csv(*scn.slot_table_path)
                : dres::generate_slot_table(scn.r.size(), 19, scn.seed);
        auto pricing = dres::run_pricing_study(scn, slots);
        tables.push_back(std::move(pricing.per_slot));
        tables.push_back(std::move(pricing.demand_sweep));
    }
    if (scn.study == "ee" || scn.study == "all") {
        log_step("running energy-efficiency study");
        tables.push_back(dres::run_ee_study(scn));
    }
    dres::emit_outputs(tables, scn);
    std::cout << "wrote " << tables.size() << " table(s) to " << scn.out_dir
              << "\n";
    return 0;
}

int cmd_validate(const std::string& path) {
    const dres::Scenario scn = dres::load_scenario(path);
    if (scn.slot_table_path) dres::ingest_reference_csv(*scn.slot_table_path);
    std::cout << "ok: " << path << " (" << scn.r.size() << " consumers, study="
              << scn.study << ")\n";
    return 0;
}

int cmd_gen_data(std::size_t consumers, int peak_hour, long long seed,
                 const std::string& out) {
    const auto table = dres::generate_slot_table(
        consumers, peak_hour, seed >= 0 ? static_cast<std::uint64_t>(seed) : 0);
    dres::write_slot_table(table, out);
    std::cout << "wrote " << out << " (" << consumers << " consumers, peak "
              << peak_hour << ":00)\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Demand-response experiment toolkit"};
    app.require_subcommand(1);

    std::string scenario_path, study, out_dir, table_out = "table.csv";
    long long seed = -1;
    int trials = 0, peak_hour = 19;
    std::size_t consumers = 5;

    auto* run = app.add_subcommand("run", "Run the studies of a scenario");
    run->add_option("scenario", scenario_path, "Scenario JSON file")
        ->required();
    run->add_option("--study", study,
                    "Override study: allocation, pricing, ee, or all")
        ->check(CLI::IsMember({"allocation", "pricing", "ee", "all"}));
    run->add_option("--out", out_dir, "Override output directory");
    run->add_option("--seed", seed, "Override RNG seed");
    run->add_option("--trials", trials, "Override pricing-sweep trials")
        ->check(CLI::PositiveNumber);

    auto* validate =
        app.add_subcommand("validate", "Check a scenario file and exit");
    validate->add_option("scenario", scenario_path, "Scenario JSON file")
        ->required();

    auto* gen = app.add_subcommand("gen-data",
                                   "Generate a synthetic slot table CSV");
    gen->add_option("--consumers", consumers, "Number of consumers")
        ->check(CLI::PositiveNumber);
    gen->add_option("--peak-hour", peak_hour, "Evening peak hour (0-23)")
        ->check(CLI::Range(0, 23));
    gen->add_option("--seed", seed, "RNG seed");
    gen->add_option("--out", table_out, "Output CSV path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed())
            return cmd_run(scenario_path, study, out_dir, seed, trials);
        if (validate->parsed()) return cmd_validate(scenario_path);
        return cmd_gen_data(consumers, peak_hour, seed, table_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
