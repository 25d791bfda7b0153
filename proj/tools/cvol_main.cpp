// Command-line front end: validate a configuration, price it spectrally,
// and cross-check with Monte Carlo.
#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include <Eigen/Core>

#include "../vendor/CLI11.hpp"
#include "cvol/config.hpp"
#include "cvol/run.hpp"

namespace {

cvol::RunConfig load(const std::string& path, const std::string& seed_override) {
    cvol::RunConfig cfg = cvol::load_config(path);
    if (!seed_override.empty()) {
        if (!cfg.mc) cfg.mc.emplace();
        cfg.mc->seed = std::stoull(seed_override);
    }
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"corridor variance pricing via Markov chains"};
    app.require_subcommand(1);
    app.fallthrough();  // accept global flags after the subcommand name

    std::string config_path;
    std::string outdir = "out";
    std::string seed;
    long pilot_paths = 2000;
    int threads = 0;
    app.add_option("--threads", threads,
                   "linear algebra threads (0 keeps the library default)");

    CLI::App* validate =
        app.add_subcommand("validate", "resolve a configuration and check the "
                                       "matching windows and lattice span");
    validate->add_option("--config", config_path, "YAML configuration")
        ->required();
    validate->add_option("--pilot-paths", pilot_paths,
                         "simulation budget for the lattice-span check");
    validate->add_option("--seed", seed, "override the simulation seed");

    CLI::App* run = app.add_subcommand(
        "run", "price every configured claim from the chain's joint law");
    run->add_option("--config", config_path, "YAML configuration")->required();
    run->add_option("--outdir", outdir, "directory for CSV output");
    run->add_option("--seed", seed, "override the simulation seed");

    CLI::App* mc = app.add_subcommand(
        "mc", "price the configured claims by simulation only");
    mc->add_option("--config", config_path, "YAML configuration")->required();
    mc->add_option("--outdir", outdir, "directory for CSV output");
    mc->add_option("--seed", seed, "override the simulation seed");

    CLI::App* compare = app.add_subcommand(
        "compare", "spectral prices with Monte Carlo columns attached");
    compare->add_option("--config", config_path, "YAML configuration")
        ->required();
    compare->add_option("--outdir", outdir, "directory for CSV output");
    compare->add_option("--seed", seed, "override the simulation seed");

    CLI11_PARSE(app, argc, argv);
    if (threads > 0) Eigen::setNbThreads(threads);

    try {
        const cvol::RunConfig cfg = load(config_path, seed);
        if (validate->parsed())
            return cvol::cmd_validate(cfg, pilot_paths, std::cout);
        if (run->parsed()) return cvol::cmd_run(cfg, outdir, false, std::cout);
        if (mc->parsed()) return cvol::cmd_mc(cfg, outdir, std::cout);
        return cvol::cmd_run(cfg, outdir, true, std::cout);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
