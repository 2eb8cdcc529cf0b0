#pragma once

#include <map>
#include <string>
#include <vector>

namespace simonlab::runner {

// Flat key-value experiment configuration; the CLI flags and the config
// file format both map onto this. Unknown keys are config errors.
using ConfigMap = std::map<std::string, std::string>;

// Parses the documented config file format: one `key = value` per line,
// `#` comments, blank lines ignored.
ConfigMap parse_config_file(const std::string& path);

struct RunResult {
    int exit_code = 0;        // 0 success, 1 attack/criterion failure, 2 config error
    std::string report;       // JSON Lines: one record per trial plus a summary
    std::string summary;      // one human-readable line
};

std::vector<std::string> subcommands();

// Executes a subcommand. All randomness derives from the `seed` key; trial i
// uses derive_seed(seed, i) so any trial replays in isolation.
RunResult run_experiment(const std::string& subcommand, const ConfigMap& config);

}  // namespace simonlab::runner
