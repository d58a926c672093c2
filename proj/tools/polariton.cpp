#include "polariton/cli/commands.hpp"

#include <CLI11.hpp>

#include <exception>
#include <iostream>
#include <map>
#include <string>

int main(int argc, char** argv) {
    CLI::App app{"Multimode Hopfield polariton engine"};
    app.require_subcommand(1);

    polariton::cli::CommandContext ctx;
    std::string config;
    std::string out_dir = ".";
    app.add_option("--seed", ctx.seed, "seed for synthetic noise")->capture_default_str();
    app.add_flag("--quiet", ctx.quiet, "suppress progress output");

    const std::map<std::string, std::string> about{
        {"dispersion", "branch frequencies, Hopfield coefficients and weights over a cavity sweep"},
        {"hopfield", "Hopfield coefficients with their low-cavity asymptotics"},
        {"g2", "equal-time phonon g2 over cavity frequency and temperature"},
        {"fit", "fit plasma frequencies to a peak table"},
        {"peaks", "Lorentzian peak extraction from a transmission spectrum"},
        {"tinkham", "thin-film conductivity and dielectric function from two traces"},
        {"oracle", "compare Bogoliubov results with truncated-Fock diagonalization"},
        {"synth", "write synthetic spectra, traces and peak tables"}};

    for (const auto& name : polariton::cli::command_names()) {
        auto* sub = app.add_subcommand(name, about.at(name));
        sub->add_option("--config", config, "JSON configuration")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "output directory")->capture_default_str();
        sub->add_option("--seed", ctx.seed, "seed for synthetic noise");
        sub->add_flag("--quiet", ctx.quiet, "suppress progress output");
    }

    CLI11_PARSE(app, argc, argv);

    ctx.config = config;
    ctx.out_dir = out_dir;
    const std::string name = app.get_subcommands().front()->get_name();
    try {
        return polariton::cli::run_command(name, ctx);
    } catch (const std::exception& e) {
        std::cerr << "polariton " << name << ": " << e.what() << "\n";
        return 1;
    }
}
