// Command-line front end: admissibility checks, ensemble simulation, moment
// sweeps, invariant-measure estimation and total-variation convergence
// experiments, all driven by a JSON configuration with mandatory seeding.

#include <cstdint>
#include <exception>
#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "levysde/experiments.hpp"
#include "levysde/version.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string out_dir;
    int threads = 0;
    std::string scheme;
    bool svg = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "JSON configuration file")
        ->required();
    cmd->add_option("--seed", args.seed, "seed override (mandatory here or in the config)")
        ->each([&args](const std::string&) { args.seed_set = true; });
    cmd->add_option("--out", args.out_dir, "output directory override");
    cmd->add_option("--threads", args.threads,
                    "worker threads (default: available cores)");
    cmd->add_option("--scheme", args.scheme, "scheme override")
        ->check(CLI::IsMember({"exp_euler", "picard"}));
    cmd->add_flag("--svg", args.svg, "also emit SVG charts");
}

levysde::ExperimentConfig load_merged(const CommonArgs& args) {
    levysde::ExperimentConfig cfg = levysde::load_config(args.config_path);
    if (args.seed_set) cfg.seed = args.seed;
    if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
    if (args.scheme == "exp_euler") cfg.scheme = levysde::Scheme::exp_euler;
    if (args.scheme == "picard") cfg.scheme = levysde::Scheme::picard;
    return cfg;
}

levysde::RunOptions run_options(const CommonArgs& args) {
    levysde::RunOptions opts;
    opts.threads = args.threads > 0
                       ? args.threads
                       : static_cast<int>(std::thread::hardware_concurrency());
    if (opts.threads < 1) opts.threads = 1;
    opts.svg = args.svg;
    return opts;
}

int as_int(levysde::ExitCode code) { return static_cast<int>(code); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"levysde: spectral simulation of Levy-driven semilinear "
                 "equations with ergodicity diagnostics"};
    app.set_version_flag("--version", levysde::kVersion);
    app.require_subcommand(1);

    CommonArgs check_args, simulate_args, moments_args, converge_args,
        invariant_args;
    add_common(app.add_subcommand("check",
                                  "evaluate the parameter admissibility "
                                  "conditions and print the report"),
               check_args);
    add_common(app.add_subcommand("simulate",
                                  "sample trajectory ensembles and write "
                                  "snapshot CSVs"),
               simulate_args);
    add_common(app.add_subcommand(
                   "moments", "sweep the empirical p-th moment over the grid"),
               moments_args);
    add_common(app.add_subcommand("converge",
                                  "estimate total-variation decay to the "
                                  "invariant law and fit the rate"),
               converge_args);
    add_common(app.add_subcommand("invariant",
                                  "build the long-run ensemble with a "
                                  "stationarity diagnostic"),
               invariant_args);

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("check")) {
            auto cfg = load_merged(check_args);
            return as_int(levysde::run_check(cfg, std::cout).exit_code);
        }
        if (app.got_subcommand("simulate")) {
            auto cfg = load_merged(simulate_args);
            return as_int(levysde::run_simulate(cfg, run_options(simulate_args),
                                                std::cout));
        }
        if (app.got_subcommand("moments")) {
            auto cfg = load_merged(moments_args);
            return as_int(levysde::run_moments(cfg, run_options(moments_args),
                                               std::cout));
        }
        if (app.got_subcommand("converge")) {
            auto cfg = load_merged(converge_args);
            return as_int(levysde::run_converge(cfg, run_options(converge_args),
                                                std::cout));
        }
        if (app.got_subcommand("invariant")) {
            auto cfg = load_merged(invariant_args);
            return as_int(levysde::run_invariant(
                cfg, run_options(invariant_args), std::cout));
        }
    } catch (const levysde::UsageError& err) {
        std::cerr << "usage error: " << err.what() << "\n";
        return as_int(levysde::ExitCode::usage);
    } catch (const levysde::ParameterError& err) {
        std::cerr << "parameter error: " << err.what() << "\n";
        return as_int(levysde::ExitCode::usage);
    } catch (const levysde::ConvergenceError& err) {
        std::cerr << "convergence failure: " << err.what() << "\n";
        return as_int(levysde::ExitCode::convergence);
    } catch (const levysde::InsufficientDataError& err) {
        std::cerr << "insufficient data: " << err.what() << "\n";
        return as_int(levysde::ExitCode::insufficient_data);
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return as_int(levysde::ExitCode::failure);
    }
    return as_int(levysde::ExitCode::usage);
}
