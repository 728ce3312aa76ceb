#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "enclosure/config.hpp"
#include "enclosure/errors.hpp"
#include "enclosure/extraction.hpp"
#include "enclosure/manifest.hpp"
#include "enclosure/pipeline.hpp"
#include "enclosure/trace_io.hpp"

namespace {

using namespace enclosure;

struct CommonArgs {
    std::string config_path;
    std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("-c,--config", args.config_path, "experiment config file")->required();
    cmd->add_option("--set", args.overrides,
                    "override a config key, e.g. --set resolution=32 (repeatable)");
}

cli::ExperimentConfig load(const CommonArgs& args) {
    cli::ExperimentConfig cfg = cli::load_config(args.config_path);
    for (const std::string& o : args.overrides) cfg = cli::with_override(cfg, o);
    return cfg;
}

int cmd_validate(const CommonArgs& args) {
    const cli::ExperimentConfig cfg = load(args);
    const extract::AdmissibilityReport report = extract::validate_admissibility(
        cfg.cavity(), cfg.obstacle ? &*cfg.obstacle : nullptr, cfg.pulse, cfg.horizon);
    std::cout << report.to_text();
    return report.required_pass ? 0 : 2;
}

int cmd_simulate(const CommonArgs& args) {
    const cli::ExperimentConfig cfg = load(args);
    fdtd::SolveStats stats;
    const fdtd::BoundaryTrace trace = cli::simulate(cfg, /*with_obstacle=*/true, &stats);
    std::filesystem::create_directories(cfg.output_dir);
    const std::string trace_path =
        (std::filesystem::path(cfg.output_dir) / "trace.bin").string();
    io::write_trace(trace_path, trace);

    cli::RunManifest manifest(cfg.raw_text);
    manifest.set_solver_stats(stats.steps, stats.cfl_ratio, stats.max_field);
    manifest.add_file(cfg.output_dir, "trace.bin");
    const std::string manifest_path =
        (std::filesystem::path(cfg.output_dir) / "manifest.json").string();
    manifest.write(manifest_path);
    std::cout << "trace: " << trace_path << "\nmanifest: " << manifest_path << "\n";
    return 0;
}

int cmd_invert(const CommonArgs& args, const std::string& trace_path) {
    cli::ExperimentConfig cfg = load(args);
    if (!trace_path.empty()) cfg.trace_file = trace_path;
    if (cfg.trace_file.empty())
        throw ConfigError("invert needs a trace file (config trace_file or --trace)");
    const cli::RunOutcome outcome = cli::run_experiment(cfg);
    if (outcome.extraction) {
        std::cout << extract::extraction_record(outcome.extraction, "", outcome.trend);
    } else {
        std::cout << extract::extraction_record(std::nullopt, outcome.null_reason);
    }
    std::cout << "manifest: " << outcome.manifest_path << "\n";
    return outcome.exit_code;
}

int cmd_run(const CommonArgs& args) {
    const cli::ExperimentConfig cfg = load(args);
    const cli::RunOutcome outcome = cli::run_experiment(cfg);
    std::cout << extract::extraction_record(outcome.extraction, outcome.null_reason, outcome.trend);
    std::cout << "manifest: " << outcome.manifest_path << "\n";
    return outcome.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Time-domain cavity probing: recover the enclosing radius of a hidden "
                 "obstacle from one boundary measurement"};
    app.require_subcommand(1);

    CommonArgs validate_args, simulate_args, invert_args, run_args;
    std::string invert_trace;
    std::string oracle_level = "quick";
    unsigned oracle_seed = 1;
    std::string plots_manifest;

    add_common(app.add_subcommand("validate", "check the admissibility conditions"),
               validate_args);
    add_common(app.add_subcommand("simulate", "forward solve only; writes the boundary trace"),
               simulate_args);
    CLI::App* invert_cmd =
        app.add_subcommand("invert", "trace -> indicator -> extraction (blind mode)");
    add_common(invert_cmd, invert_args);
    invert_cmd->add_option("--trace", invert_trace, "recorded boundary-trace file");
    add_common(app.add_subcommand("run", "full pipeline: simulate + invert + persist"), run_args);

    CLI::App* oracle_cmd =
        app.add_subcommand("oracle-suite", "closed-form identity and quadrature cross-checks");
    oracle_cmd->add_option("--level", oracle_level, "quick or full")
        ->check(CLI::IsMember({"quick", "full"}));
    oracle_cmd->add_option("--seed", oracle_seed, "random seed for the draws");

    CLI::App* plots_cmd = app.add_subcommand("emit-plots", "write plot data next to a manifest");
    plots_cmd->add_option("--manifest", plots_manifest, "run manifest path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("validate")) return cmd_validate(validate_args);
        if (app.got_subcommand("simulate")) return cmd_simulate(simulate_args);
        if (app.got_subcommand("invert")) return cmd_invert(invert_args, invert_trace);
        if (app.got_subcommand("run")) return cmd_run(run_args);
        if (app.got_subcommand("oracle-suite"))
            return enclosure::cli::oracle_suite(oracle_level, oracle_seed, std::cout) == 0 ? 0 : 1;
        if (app.got_subcommand("emit-plots")) {
            std::cout << enclosure::cli::emit_plot_data(plots_manifest) << "\n";
            return 0;
        }
    } catch (const enclosure::AdmissibilityError& e) {
        std::cerr << "admissibility failure: " << e.what() << "\n";
        return 2;
    } catch (const enclosure::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
