#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "mirrorvi/experiment.hpp"

namespace {

int to_exit_code(mirrorvi::ExitStatus s) { return static_cast<int>(s); }

} // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "mirrorvi: mirror extragradient / extrapolation solvers for "
        "variational inequalities, with bound certification"};
    app.require_subcommand(1);

    std::string out_dir = ".";
    std::optional<std::uint64_t> seed_override;
    bool quiet = false;
    std::uint64_t seed_value = 0;
    std::vector<CLI::Option*> seed_opts;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--out-dir", out_dir, "Directory for traces and summaries");
        seed_opts.push_back(
            cmd->add_option("--seed", seed_value, "Override the config seed"));
        cmd->add_flag("--quiet", quiet, "Suppress progress output");
    };

    std::string run_config;
    auto* run_cmd = app.add_subcommand("run", "Execute one experiment config");
    run_cmd->add_option("config", run_config, "Path to a JSON experiment config")
        ->required();
    add_common(run_cmd);

    std::vector<std::string> cmp_configs;
    auto* cmp_cmd = app.add_subcommand(
        "compare", "Run several configs on one problem and tabulate metrics "
                   "at checkpoints");
    cmp_cmd->add_option("configs", cmp_configs, "Paths to JSON experiment configs")
        ->required()
        ->expected(-1);
    add_common(cmp_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : to_exit_code(mirrorvi::ExitStatus::ConfigError);
    }
    for (const CLI::Option* opt : seed_opts)
        if (opt->count() > 0) seed_override = seed_value;

    try {
        if (run_cmd->parsed()) {
            const auto cfg = mirrorvi::load_config_file(run_config);
            const auto result =
                mirrorvi::run_experiment(cfg, out_dir, quiet, seed_override);
            if (result.status != mirrorvi::ExitStatus::Ok && quiet)
                std::cerr << result.message << "\n";
            return to_exit_code(result.status);
        }
        std::vector<mirrorvi::ExperimentConfig> cfgs;
        cfgs.reserve(cmp_configs.size());
        for (const auto& p : cmp_configs)
            cfgs.push_back(mirrorvi::load_config_file(p));
        const auto result =
            mirrorvi::compare_methods(cfgs, out_dir, quiet, seed_override);
        if (result.status != mirrorvi::ExitStatus::Ok && quiet)
            std::cerr << result.message << "\n";
        return to_exit_code(result.status);
    } catch (const mirrorvi::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return to_exit_code(mirrorvi::ExitStatus::ConfigError);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return to_exit_code(mirrorvi::ExitStatus::NumericError);
    }
}
