#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "smj/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"smj — uniformization engine for duration-dependent multi-state models"};
    app.require_subcommand(1);

    smj::CommandOptions options;
    std::vector<double> gammas;
    std::vector<std::uint64_t> seeds;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", options.config_path, "run-config JSON file")
            ->required()
            ->check(CLI::ExistingFile);
        cmd->add_option("--out", options.out_dir, "output directory override");
        cmd->add_option("--gamma", gammas, "uniformization rate list override");
        cmd->add_option("--seeds", seeds, "grid seed list override");
        cmd->add_option("--mode", options.mode_override,
                        "conditional|unconditional|both");
    };

    CLI::App* validate = app.add_subcommand("validate", "check model and payments");
    add_common(validate);

    CLI::App* transition = app.add_subcommand("transition", "dump transition measures");
    add_common(transition);
    transition->add_option("-s,--time", options.s, "evaluation time")->required();

    CLI::App* cashflow = app.add_subcommand("cashflow", "expected cashflow curves");
    add_common(cashflow);
    cashflow->add_flag("--with-mc", options.with_mc, "run the Monte Carlo oracle too");

    CLI::App* reserve = app.add_subcommand("reserve", "prospective reserves");
    add_common(reserve);

    CLI::App* convergence = app.add_subcommand("convergence", "diagnostics sweep");
    add_common(convergence);

    CLI11_PARSE(app, argc, argv);
    options.gamma_override = gammas;
    options.seed_override = seeds;

    try {
        if (validate->parsed()) return smj::cmd_validate(options);
        if (transition->parsed()) return smj::cmd_transition(options);
        if (cashflow->parsed()) return smj::cmd_cashflow(options);
        if (reserve->parsed()) return smj::cmd_reserve(options);
        if (convergence->parsed()) return smj::cmd_convergence(options);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
