// Run one scenario from a config file and write CSV output.
//
// Exit codes: 0 ok, 1 config error, 2 dimension refusal, 3 validation failure.

#include "scramble/cli/csv.hpp"
#include "scramble/cli/runner.hpp"
#include "scramble/parallel.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

int main(int argc, char** argv) {
    using namespace scramble::cli;

    CLI::App app{"Configuration-driven OTOC scenario runner"};
    std::string config_path, output_dir, scenario;
    std::optional<std::uint64_t> seed;
    int threads = 0;
    app.add_option("--config", config_path, "scenario config (JSON, comments allowed)")->required();
    app.add_option("--output", output_dir, "output directory (overrides output.dir)");
    app.add_option("--seed", seed, "random seed (overrides config)");
    app.add_option("--threads", threads, "worker threads, 0 = all cores")->check(CLI::NonNegativeNumber);
    app.add_option("--scenario", scenario, "scenario name (overrides config)");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    ScenarioConfig cfg;
    try {
        cfg = load_config(config_path, scenario.empty() ? std::nullopt : std::optional<std::string>(scenario));
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    }
    if (seed) cfg.seed = *seed;
    if (!output_dir.empty()) cfg.output.dir = output_dir;
    scramble::set_worker_count(threads);

    RunResult result;
    try {
        result = run_scenario(cfg);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const DimensionRefusal& e) {
        std::cerr << "refused: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }

    try {
        for (const auto& p : write_outputs(result, cfg.output.dir, cfg.output.prefix)) std::cout << "wrote " << p.string() << '\n';
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    for (const auto& t : result.tables) {
        if (t.name != "validation" && t.name != "haar_identity") continue;
        for (const auto& row : t.rows) {
            std::cout << row.back() << "  ";
            for (std::size_t c = 0; c + 1 < row.size(); ++c) std::cout << (c ? "  " : "") << row[c];
            std::cout << '\n';
        }
    }
    std::printf("wall time %.2f s\n", result.wall_time);
    return result.validation_failed ? 3 : 0;
}
