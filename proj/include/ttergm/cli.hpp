#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

namespace ttergm {

// Exit codes shared by all subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitData = 4;

struct CliOverrides {
    bool has_seed = false;
    std::uint64_t seed = 0;
    bool has_out = false;
    std::filesystem::path out;
    bool has_threads = false;
    unsigned threads = 0;
};

// Entry points used by main() and exercised directly by tests. Each reads
// the JSON config at `config_path`, applies overrides, runs the stage, and
// returns an exit code.
int cmd_ingest(const std::filesystem::path& config_path, const CliOverrides& overrides);
int cmd_estimate(const std::filesystem::path& config_path, const CliOverrides& overrides);
int cmd_simulate(const std::filesystem::path& config_path, const CliOverrides& overrides);
int cmd_evaluate(const std::filesystem::path& config_path, const CliOverrides& overrides);

int run_cli(int argc, const char* const* argv);

} // namespace ttergm
