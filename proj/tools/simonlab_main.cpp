#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "simonlab/runner.hpp"

namespace {

struct OptionSpec {
    const char* key;     // config key
    const char* flag;    // CLI flag (dashes instead of underscores)
    const char* help;
    bool is_flag = false;
};

struct SubcommandSpec {
    const char* name;
    const char* help;
    std::vector<OptionSpec> options;
};

std::vector<SubcommandSpec> subcommand_table() {
    const OptionSpec seed{"seed", "--seed", "master seed; all randomness derives from it"};
    const OptionSpec trials{"trials", "--trials", "number of independent trials"};
    const OptionSpec timing{"timing", "--timing", "on/off: include wall_ms fields in reports"};
    const OptionSpec roll{"roll", "--roll", "rolling function kind: linear | perm"};
    const OptionSpec block{"b", "--b", "Farfalle block size in bits (4..16)"};
    const OptionSpec tag{"t", "--t", "tag length in bits"};

    return {
        {"simon-demo",
         "Period recovery on the demo oracles",
         {{"kind", "--kind", "prop1 | even-mansour | lrw | feistel3"},
          {"n", "--n", "oracle input bits (<= 12)"},
          {"extra", "--extra", "stop after this many rank-stable samples"},
          trials,
          seed,
          timing}},
        {"farfalle-period",
         "Period spaces of the Farfalle output-block constructions",
         {{"variant", "--variant", "c1a | c1b | c2i | c2ii"},
          block,
          roll,
          {"blank", "--blank", "on/off: skip the blank index between strings"},
          {"j", "--j", "output block index observed"},
          {"indices", "--indices", "c2i variable-block positions, e.g. 0,2"},
          trials,
          seed,
          timing}},
        {"extract-key",
         "Secret-key extraction from periods of a linear rolling function",
         {block,
          {"pairs", "--pairs", "index pairs per period, e.g. 0,1 or 0,2;1,3"},
          trials,
          seed,
          timing}},
        {"forge-sae",
         "Session-AE forgery via the metadata period (empty plaintext path)",
         {block,
          tag,
          {"ell", "--ell", "session alignment unit (default: block size)"},
          roll,
          {"blank", "--blank", "on/off: skip the blank index between strings"},
          trials,
          seed,
          timing}},
        {"forge-siv",
         "Synthetic-IV forgeries, variants i and ii",
         {{"variant", "--variant", "i | ii"},
          block,
          tag,
          roll,
          {"blank", "--blank", "on/off: skip the blank index between strings"},
          trials,
          seed,
          timing}},
        {"distinguish-wbc",
         "Wide-block-cipher vs random-permutation distinguisher",
         {block,
          roll,
          {"blank", "--blank", "on/off: skip the blank index between strings"},
          trials,
          seed,
          timing}},
        {"gfn-extract",
         "Round-key extraction from Feistel periods (lagrange | anf)",
         {{"method", "--method", "lagrange | anf"},
          {"n", "--n", "branch bits"},
          {"degree", "--degree", "planted degree of the inner function"},
          {"oversample", "--oversample", "extra interpolation points (lagrange)"},
          {"modulus", "--modulus", "hex coefficient mask of the field modulus (lagrange)"},
          {"count_only", "--count-only", "print the required sample count and exit", true},
          trials,
          seed,
          timing}},
        {"selftest", "Run the cross-module invariant battery", {seed, timing}},
        {"fixtures",
         "Verify (or with --regen rewrite) the golden fixture files",
         {{"regen", "--regen", "rewrite the fixture files", true},
          {"dir", "--dir", "fixture directory"},
          seed,
          timing}},
    };
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"simonlab: a desk-scale workbench for Simon-style period attacks on "
                 "Farfalle modes and Feistel networks"};
    app.require_subcommand(1);

    struct Invocation {
        std::string name;
        simonlab::runner::ConfigMap flags;
        std::string config_file;
        std::string out_path;
    };
    Invocation invocation;

    for (const auto& spec : subcommand_table()) {
        CLI::App* sub = app.add_subcommand(spec.name, spec.help);
        sub->add_option_function<std::string>(
            "--config",
            [&invocation](const std::string& path) { invocation.config_file = path; },
            "load a key = value config file (flags override it)");
        sub->add_option_function<std::string>(
            "--out", [&invocation](const std::string& path) { invocation.out_path = path; },
            "write the JSONL report to this file instead of stdout");
        for (const auto& option : spec.options) {
            const std::string key = option.key;
            if (option.is_flag) {
                sub->add_flag_callback(
                    option.flag, [&invocation, key]() { invocation.flags[key] = "on"; },
                    option.help);
            } else {
                sub->add_option_function<std::string>(
                    option.flag,
                    [&invocation, key](const std::string& value) {
                        invocation.flags[key] = value;
                    },
                    option.help);
            }
        }
        sub->callback([&invocation, name = std::string(spec.name)]() { invocation.name = name; });
    }

    CLI11_PARSE(app, argc, argv);

    simonlab::runner::ConfigMap config;
    try {
        if (!invocation.config_file.empty()) {
            config = simonlab::runner::parse_config_file(invocation.config_file);
        }
    } catch (const std::exception& error) {
        std::cerr << "error: " << error.what() << "\n";
        return 2;
    }
    for (const auto& [key, value] : invocation.flags) config[key] = value;

    simonlab::runner::RunResult result;
    try {
        result = simonlab::runner::run_experiment(invocation.name, config);
    } catch (const std::exception& error) {
        std::cerr << "error: " << error.what() << "\n";
        return 1;
    }

    if (result.exit_code == 2) {
        std::cerr << "error: " << result.summary << "\n";
        return 2;
    }
    if (invocation.out_path.empty()) {
        std::cout << result.report;
    } else {
        std::ofstream out(invocation.out_path);
        if (!out) {
            std::cerr << "error: cannot write " << invocation.out_path << "\n";
            return 2;
        }
        out << result.report;
    }
    std::cerr << result.summary << "\n";
    return result.exit_code;
}
