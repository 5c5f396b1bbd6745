// simregress: non-regression and benchmarking harness for nondeterministic
// simulation codes.
//
//   simregress compare <MODEL> <run_dir> <ref_dir> [--thr X] [--window A:B]
//   simregress run <PREFIX> <MODEL> [--dry-run] [--resume]
//   simregress timing <keyword> <log_file> [--limit N] <dir>...
//   simregress scale-report --log <file> --iter <k> <cores,nodes,procs,threads:dir>...
//   simregress store <run_dir> <modelNNN/label>
//   simregress list [--model N]
//   simregress simulate --config <file> --out <dir> [--seed N]
//
// Exit codes: 0 success / OK, 1 comparison FAIL, 2 usage or I/O error.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "simregress/benchstore.hpp"
#include "simregress/error.hpp"
#include "simregress/launcher.hpp"
#include "simregress/metric.hpp"
#include "simregress/scenario.hpp"
#include "simregress/text.hpp"
#include "simregress/timers.hpp"
#include "simregress/timeseries.hpp"
#include "simregress/toysim.hpp"

namespace fs = std::filesystem;
using namespace simregress;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFail = 1;
constexpr int kExitError = 2;

std::pair<double, double> parse_window(const std::string& text) {
    const auto colon = text.find(':');
    const auto a = colon == std::string::npos ? std::nullopt : parse_real(text.substr(0, colon));
    const auto b = colon == std::string::npos ? std::nullopt : parse_real(text.substr(colon + 1));
    if (!a || !b) {
        throw Error(ErrorCode::InvalidSpec, "window must be <t_start>:<t_end>, got '" + text + "'");
    }
    return {*a, *b};
}

struct CompareArgs {
    std::string model;
    std::string run_dir;
    std::string ref_dir;
    std::optional<double> thr;
    std::string window;
    std::string layout;
    std::string extract_dir;
    std::string registry;
};

int do_compare(const CompareArgs& args) {
    const fs::path registry = args.registry.empty() ? default_registry_dir() : fs::path(args.registry);
    const Scenario scenario = load_scenario(args.model, registry);
    MetricSpec spec = scenario.metric_defaults;
    if (args.thr) {
        spec.thr = *args.thr;
    }
    if (!args.window.empty()) {
        std::tie(spec.t_start, spec.t_end) = parse_window(args.window);
    }
    const ColumnLayout layout = args.layout.empty() ? ColumnLayout{} : load_column_layout(args.layout);

    // The reference is A: its in-window times define the total line count.
    const auto ref = parse_macroscopic((fs::path(args.ref_dir) / kMacroscopicFileName).string(), layout);
    const auto run = parse_macroscopic((fs::path(args.run_dir) / kMacroscopicFileName).string(), layout);

    const fs::path extract_dir = args.extract_dir.empty() ? fs::path() : fs::path(args.extract_dir);
    CompareOptions options;
    options.extract_a = (extract_dir / "f1").string();
    options.extract_b = (extract_dir / "f2").string();
    const auto report = compare(ref, run, spec, options);
    std::cout << render_report(report);
    return report.verdict == Verdict::ok ? kExitOk : kExitFail;
}

struct RunArgs {
    std::string prefix;
    std::string model;
    bool dry_run = false;
    bool resume = false;
    std::string exe;
    std::string compile;
    bool no_compile = false;
    std::string registry;
};

int do_run(const RunArgs& args) {
    const fs::path registry = args.registry.empty() ? default_registry_dir() : fs::path(args.registry);
    const Scenario scenario = load_scenario(args.model, registry);
    LaunchEnvironment env = LaunchEnvironment::from_environment();
    env.dry_run = args.dry_run;
    if (!args.exe.empty()) {
        env.executable = args.exe;
    }
    if (!args.compile.empty()) {
        env.compile_command = args.compile;
        env.compile_first = true;
    }
    if (args.no_compile) {
        env.compile_first = false;
    }
    const auto run = launch(scenario, env, args.prefix, args.resume);
    std::cout << run.path.string() << ": " << run.completed_steps << "/" << run.total_steps << " executions completed"
              << (env.dry_run ? " (dry run, see " + std::string(kLaunchScriptName) + ")" : "") << "\n";
    return kExitOk;
}

struct TimingArgs {
    std::string keyword;
    std::string log_file;
    std::optional<std::size_t> limit;
    std::vector<std::string> dirs;
};

int do_timing(const TimingArgs& args) {
    std::cout << timing_bench(TimerKeyword(args.keyword), args.log_file, args.limit, args.dirs);
    return kExitOk;
}

struct ScaleArgs {
    std::string log_file;
    std::size_t iteration = 1;
    std::vector<std::string> runs;
    std::vector<std::string> pathological;
    bool exclude_pathological = false;
    bool machine_only = false;
};

int do_scale_report(const ScaleArgs& args) {
    std::vector<ScalingRun> runs;
    for (const auto& spec : args.runs) {
        const auto colon = spec.find(':');
        if (colon == std::string::npos) {
            throw Error(ErrorCode::InvalidSpec, "expected <cores,nodes,procs,threads>:<dir>, got '" + spec + "'");
        }
        ScalingRun run;
        run.config = parse_scaling_config(std::string_view(spec).substr(0, colon));
        run.run_dir = spec.substr(colon + 1);
        for (const auto& p : args.pathological) {
            if (fs::path(p).lexically_normal() == run.run_dir.lexically_normal()) {
                run.pathological = true;
            }
        }
        runs.push_back(std::move(run));
    }
    const auto table = scaling_report(runs, args.log_file, args.iteration, args.exclude_pathological);
    if (!args.machine_only) {
        std::cout << render_scaling_table(table) << "\n";
    }
    std::cout << format_scaling_machine(table);
    return kExitOk;
}

int do_store(const std::string& run_dir, const std::string& destination, const std::string& store) {
    const auto [model_id, label] = parse_reference_destination(destination);
    const fs::path root = store.empty() ? default_store_root() : fs::path(store);
    const auto entry = store_reference(run_dir, root, model_id, label);
    std::cout << "stored " << entry.path.string() << ":";
    for (const auto& f : entry.files) {
        std::cout << " " << f;
    }
    std::cout << "\nfill in " << (entry.path / kReadmeName).string() << " to describe the machine\n";
    return kExitOk;
}

int do_list(std::optional<int> model, const std::string& store) {
    const fs::path root = store.empty() ? default_store_root() : fs::path(store);
    for (const auto& entry : list_references(root, model)) {
        std::cout << "model" << entry.model_id << "/" << entry.label << "  ( " << entry.metadata.comment << " )  "
                  << entry.files.size() << " files\n";
    }
    return kExitOk;
}

int do_simulate(const std::string& config_path, const std::string& out, std::optional<std::uint64_t> seed) {
    ToyConfig config = config_path.empty() ? ToyConfig{} : load_toy_config(config_path);
    if (seed) {
        config.seed = *seed;
    }
    write_run(config, out);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Non-regression testing and benchmarking harness for nondeterministic simulation codes"};
    app.require_subcommand(1);

    CompareArgs compare_args;
    auto* compare_cmd = app.add_subcommand("compare", "Compare a run against a reference run");
    compare_cmd->add_option("model", compare_args.model, "Model id of the scenario (e.g. 199)")->required();
    compare_cmd->add_option("run_dir", compare_args.run_dir, "Run directory to check")->required();
    compare_cmd->add_option("ref_dir", compare_args.ref_dir, "Reference run directory")->required();
    compare_cmd->add_option("--thr", compare_args.thr, "Relative-difference threshold in (0, 2]");
    compare_cmd->add_option("--window", compare_args.window, "Time window <t_start>:<t_end>");
    compare_cmd->add_option("--layout", compare_args.layout, "Column layout file for macroscopic_vars.dat");
    compare_cmd->add_option("--extract-dir", compare_args.extract_dir, "Where to write the f1/f2 extracts");
    compare_cmd->add_option("--registry", compare_args.registry, "Scenario registry directory");

    RunArgs run_args;
    auto* run_cmd = app.add_subcommand("run", "Launch the execution chain of a reference scenario");
    run_cmd->add_option("prefix", run_args.prefix, "Directory prefix; the run goes to <BASEDIR>/<prefix><MODEL>")
        ->required();
    run_cmd->add_option("model", run_args.model, "Model id or scenario file")->required();
    run_cmd->add_flag("--dry-run", run_args.dry_run, "Write the launch script without executing it");
    run_cmd->add_flag("--resume", run_args.resume, "Continue after the last completed execution");
    run_cmd->add_option("--exe", run_args.exe, "Simulation executable (default: $SIMREGRESS_EXE)");
    run_cmd->add_option("--compile", run_args.compile, "Compile command run as '<cmd> <MODEL>' before the chain");
    run_cmd->add_flag("--no-compile", run_args.no_compile, "Skip compilation even if $SIMREGRESS_COMPILE is set");
    run_cmd->add_option("--registry", run_args.registry, "Scenario registry directory");

    TimingArgs timing_args;
    auto* timing_cmd = app.add_subcommand("timing", "Extract timer lines from run logs");
    timing_cmd->add_option("keyword", timing_args.keyword, "Timer keyword (substring match)")->required();
    timing_cmd->add_option("log_file", timing_args.log_file, "Log file name, e.g. out_loop1")->required();
    timing_cmd->add_option("--limit", timing_args.limit, "Keep the first N matching lines per directory");
    timing_cmd->add_option("dirs", timing_args.dirs, "Run directories")->required();

    ScaleArgs scale_args;
    auto* scale_cmd = app.add_subcommand("scale-report", "Strong-scaling table from timer logs");
    scale_cmd->add_option("--log", scale_args.log_file, "Log file name")->required();
    scale_cmd->add_option("--iter", scale_args.iteration, "Iteration index (1-based)")->required();
    scale_cmd->add_option("--pathological", scale_args.pathological, "Mark a run directory as pathological")
        ->allow_extra_args(false);
    scale_cmd->add_flag("--exclude-pathological", scale_args.exclude_pathological,
                        "Use the first non-pathological run as the speedup baseline");
    scale_cmd->add_flag("--machine", scale_args.machine_only, "Print only the machine-readable table");
    scale_cmd->add_option("runs", scale_args.runs, "<cores,nodes,procs,threads>:<dir>")->required();

    std::string store_run_dir;
    std::string store_dest;
    std::string store_root;
    auto* store_cmd = app.add_subcommand("store", "Save a run as a reference");
    store_cmd->add_option("run_dir", store_run_dir, "Run directory")->required();
    store_cmd->add_option("destination", store_dest, "modelNNN/label")->required();
    store_cmd->add_option("--store", store_root, "Store root (default: $SIMREGRESS_STORE or ./benchmark)");

    std::optional<int> list_model;
    std::string list_root;
    auto* list_cmd = app.add_subcommand("list", "List stored references");
    list_cmd->add_option("--model", list_model, "Only this model id");
    list_cmd->add_option("--store", list_root, "Store root (default: $SIMREGRESS_STORE or ./benchmark)");

    std::string sim_config;
    std::string sim_out;
    std::optional<std::uint64_t> sim_seed;
    auto* sim_cmd = app.add_subcommand("simulate", "Write a synthetic run with the toy simulator");
    sim_cmd->add_option("--config", sim_config, "Toy configuration file");
    sim_cmd->add_option("--out", sim_out, "Output run directory")->required();
    sim_cmd->add_option("--seed", sim_seed, "Noise seed (overrides the config)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitError;
    }

    try {
        if (*compare_cmd) {
            return do_compare(compare_args);
        }
        if (*run_cmd) {
            return do_run(run_args);
        }
        if (*timing_cmd) {
            return do_timing(timing_args);
        }
        if (*scale_cmd) {
            return do_scale_report(scale_args);
        }
        if (*store_cmd) {
            return do_store(store_run_dir, store_dest, store_root);
        }
        if (*list_cmd) {
            return do_list(list_model, list_root);
        }
        if (*sim_cmd) {
            return do_simulate(sim_config, sim_out, sim_seed);
        }
    } catch (const std::exception& e) {
        std::cerr << "simregress: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
