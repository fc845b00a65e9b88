#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "grnbounds/app/commands.hpp"
#include "grnbounds/app/config.hpp"

namespace {

int report(grnbounds::app::ExitCode code, const std::string& kind, const std::string& message) {
    nlohmann::json d = {{"error", {{"kind", kind}, {"stage", "config"}, {"message", message}}},
                        {"exit_code", static_cast<int>(code)}};
    std::cerr << d.dump() << "\n";
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    using namespace grnbounds::app;

    CLI::App app{"Density bounds, PDE moments and SSA checks for gene regulatory networks"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::string out;
    unsigned threads = 1;
    std::uint64_t seed = 0;
    std::size_t ensemble = 0;
    std::vector<double> sample_times;
    std::string theta_out;

    app.add_option("--config", config_path, "run configuration (JSON)");
    app.add_option("--out", out, "output directory, overrides the config");
    app.add_option("--threads", threads, "worker threads, 0 for all cores");
    auto* seed_opt = app.add_option("--seed", seed, "SSA / Monte Carlo seed");
    auto* ensemble_opt = app.add_option("--ensemble", ensemble, "SSA trajectories");
    auto* times_opt = app.add_option("--sample-times", sample_times, "SSA sample times")->delimiter(',');

    std::string chosen;
    for (const auto& name : command_names()) {
        auto* sub = app.add_subcommand(name);
        sub->callback([&chosen, name] { chosen = name; });
        if (name == "solve") sub->add_option("--theta-out", theta_out, "theta CSV path");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return report(kConfigError, "usage", e.what());
    }

    RunConfig cfg;
    if (chosen != "validate") {
        if (config_path.empty()) return report(kConfigError, "config", "--config: required for " + chosen);
        try {
            cfg = load_config(config_path);
        } catch (const ConfigError& e) {
            return report(kConfigError, "config", e.what());
        } catch (const IoError& e) {
            return report(kIoError, "io", e.what());
        }
    }

    CommandOptions options;
    if (!out.empty()) options.out = out;
    options.threads = threads;
    if (*seed_opt) options.seed = seed;
    if (*ensemble_opt) options.ensemble = ensemble;
    if (*times_opt) options.sample_times = sample_times;
    if (!theta_out.empty()) options.theta_out = theta_out;
    return run_command(chosen, cfg, options);
}
