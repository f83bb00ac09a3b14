// Command-line experiment runner: generate synthetic streams, validate
// experiment configs, and run prequential evaluations with drift detectors.

#include <cstdint>
#include <string>

#include <CLI11.hpp>

#include "driftmon/experiment.hpp"

int main(int argc, char** argv) {
    CLI::App app{"drift detection experiments on multi-class imbalanced streams"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    bool quiet = false;
    long length = 0;
    std::uint64_t seed = 0;

    CLI::App* run = app.add_subcommand("run", "run every (detector x seed) evaluation in a config");
    run->add_option("config", config_path, "experiment config (JSON)")->required();
    run->add_flag("--quiet", quiet, "suppress per-run progress output");

    CLI::App* validate = app.add_subcommand("validate", "validate a config without running it");
    validate->add_option("config", config_path, "experiment config (JSON)")->required();

    CLI::App* generate = app.add_subcommand("generate", "write a synthetic stream to CSV");
    generate->add_option("config", config_path, "generator config (JSON)")->required();
    generate->add_option("--out", out_path, "output CSV path")->required();
    generate->add_option("--length", length, "override stream length");
    generate->add_option("--seed", seed, "override generator seed");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) return driftmon::run_experiment(config_path, quiet);
    if (validate->parsed()) return driftmon::validate_config(config_path);
    if (generate->parsed()) return driftmon::generate_stream(config_path, out_path, length, seed);
    return 1;
}
