#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace simonlab::selftest {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

// Compact battery of the cross-module invariants; the CLI `selftest`
// subcommand runs exactly this. Deterministic for a fixed seed.
std::vector<CheckResult> run_all(std::uint64_t seed);

}  // namespace simonlab::selftest
