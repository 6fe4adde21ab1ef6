#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "bwex/errors.hpp"
#include "bwex/experiment.hpp"

namespace h = bwex::harness;

int main(int argc, char** argv) {
    CLI::App app{"beta-window exclusion: exact checks, simulation, PDE and convergence harness"};
    app.require_subcommand(1, 1);

    std::string config_path;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> workers;
    bool debug_audit = false;

    for (const char* name : {"verify", "simulate", "pde", "converge", "bench"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "JSON config file (defaults apply when omitted)");
        sub->add_option("--out", out, "output directory (overrides the config)");
        sub->add_option("--seed", seed, "master seed (overrides the config)");
        sub->add_option("--workers", workers, "worker threads for ensembles")->check(CLI::PositiveNumber);
        sub->add_flag("--debug-audit", debug_audit, "recompute all rates after every event");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : h::kConfigError;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    h::ExperimentConfig cfg;
    try {
        cfg = config_path.empty() ? h::ExperimentConfig::from_json(nlohmann::json::object())
                                  : h::load_config(config_path);
        h::Overrides o;
        if (out) {
            o.out = *out;
        }
        o.seed = seed;
        o.workers = workers;
        o.debug_audit = debug_audit;
        h::apply_overrides(cfg, o);
    } catch (const bwex::IoError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return h::kIoError;
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return h::kConfigError;
    }
    return h::run_command(command, cfg, std::cerr);
}
