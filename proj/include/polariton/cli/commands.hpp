#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace polariton::cli {

struct CommandContext {
    std::filesystem::path config;
    std::filesystem::path out_dir{"."};
    std::uint64_t seed{42};
    bool quiet{false};
    std::ostream* log{nullptr};  // defaults to std::cout
};

const std::vector<std::string>& command_names();

// Runs one subcommand.  Returns the process exit code; module and config
// errors propagate as exceptions.
int run_command(const std::string& name, const CommandContext& ctx);

int cmd_dispersion(const CommandContext& ctx);
int cmd_hopfield(const CommandContext& ctx);
int cmd_g2(const CommandContext& ctx);
int cmd_fit(const CommandContext& ctx);
int cmd_peaks(const CommandContext& ctx);
int cmd_tinkham(const CommandContext& ctx);
int cmd_oracle(const CommandContext& ctx);
int cmd_synth(const CommandContext& ctx);

}  // namespace polariton::cli
