// ecstate: command-line driver (properties | evolve | gamma | sweep)

#include "ecstate/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace ecstate::cli;

int main(int argc, char** argv) {
    CLI::App app{"Entangled coherent states of a particle coupled to a single oscillator mode"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    Overrides overrides;
    double tolerance = 0.0;
    std::string strategy;
    std::uint64_t seed = 0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("-c,--config", config_path, "INI configuration file")->required()->check(CLI::ExistingFile);
        sub->add_option("-o,--out", out_dir, "output directory")->capture_default_str();
        sub->add_option("--tolerance", tolerance, "override [run] tolerance");
        sub->add_option("--strategy", strategy, "static_unit, recoil_phase or all");
        sub->add_option("--seed", seed, "override [run] seed");
    };
    CLI::App* properties = app.add_subcommand("properties", "algebraic property suite of the ECS construction");
    CLI::App* evolve = app.add_subcommand("evolve", "zero-order solution plus residual vs the dense oracle");
    CLI::App* gamma = app.add_subcommand("gamma", "one-particle density matrix by three methods (t_end = 0)");
    CLI::App* sweep = app.add_subcommand("sweep", "coupling-strength sweep of the closed-form gap");
    for (CLI::App* sub : {properties, evolve, gamma, sweep}) add_common(sub);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfigError;
    }

    CLI::App* chosen = app.get_subcommands().front();
    if (chosen->count("--tolerance")) overrides.tolerance = tolerance;
    if (chosen->count("--strategy")) overrides.strategy = strategy;
    if (chosen->count("--seed")) overrides.seed = seed;

    try {
        const RunConfig config = apply_overrides(load_config(config_path), overrides);
        if (chosen == properties) return cmd_properties(config, out_dir, std::cout);
        if (chosen == evolve) return cmd_evolve(config, out_dir, std::cout);
        if (chosen == gamma) return cmd_gamma(config, out_dir, std::cout);
        return cmd_sweep(config, out_dir, std::cout);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitCheckFailed;
    }
}
