#pragma once

#include <cstddef>
#include <filesystem>
#include <string>

#include "simregress/scenario.hpp"

namespace simregress {

/// Machine-specific launch settings. These come from the environment
/// (PRERUN, MPIRUN, BASEDIR) and never from a scenario file.
struct LaunchEnvironment {
    std::string prerun;   // e.g. "export OMP_NUM_THREADS=8"
    std::string mpirun;   // e.g. "mpirun -np 4"; may be empty
    std::filesystem::path basedir{"."};
    bool compile_first = false;
    bool dry_run = false;
    /// Simulation binary; a placeholder name is used in dry runs when empty.
    std::string executable;
    /// Invoked as `<compile_command> <MODEL>` when compile_first is set.
    std::string compile_command;

    /// PRERUN, MPIRUN, BASEDIR, SIMREGRESS_EXE and SIMREGRESS_COMPILE.
    /// compile_first is set when SIMREGRESS_COMPILE is nonempty.
    static LaunchEnvironment from_environment();
};

struct RunDirectory {
    std::filesystem::path path;
    std::size_t total_steps = 0;
    std::size_t completed_steps = 0;
};

inline constexpr const char* kLaunchScriptName = "launch_script.sh";
inline constexpr const char* kRunMetaName = "run_meta.txt";
inline constexpr const char* kLockName = ".simregress.lock";

/// Log file of execution k (1-based): out_loop<k>.
std::string step_log_name(std::size_t k);

/// Standard-input payload of one execution: a Fortran namelist carrying the
/// scenario's input parameters plus the step's time axis and restart flag.
std::string step_namelist(const Scenario& scenario, const ExecutionStep& step);

/// Shell script running the whole chain from inside the run directory.
std::string launch_script(const Scenario& scenario, const ExecutionPlan& plan, const LaunchEnvironment& env);

/// Creates <basedir>/<dir_prefix><model_id> and runs the plan's executions
/// one after another, each `<prerun> && <mpirun> <executable>` with its
/// namelist on stdin and output in out_loop<k>. A dry run only writes the
/// launch script and run metadata. With `resume`, an existing directory is
/// reused and execution restarts after the last completed step.
RunDirectory launch(const Scenario& scenario, const LaunchEnvironment& env, const std::string& dir_prefix,
                    bool resume = false);

}  // namespace simregress
