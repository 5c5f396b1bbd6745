#include "simregress/launcher.hpp"

#include <fcntl.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include "simregress/error.hpp"
#include "simregress/keyvalue.hpp"
#include "simregress/text.hpp"

namespace fs = std::filesystem;

namespace simregress {

namespace {

std::string env_or(const char* name, const std::string& fallback) {
    const char* v = std::getenv(name);
    return v != nullptr ? std::string(v) : fallback;
}

std::string shell_quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\'') {
            out += "'\\''";
        } else {
            out += c;
        }
    }
    return out + "'";
}

std::string fortran_bool(bool v) {
    return v ? ".t." : ".f.";
}

std::string join_reals(const std::vector<double>& values) {
    std::string out;
    for (double v : values) {
        out += (out.empty() ? "" : " ") + format_short(v);
    }
    return out;
}

std::string join_ints(const std::vector<long long>& values) {
    std::string out;
    for (long long v : values) {
        out += (out.empty() ? "" : " ") + std::to_string(v);
    }
    return out;
}

std::string resolved_executable(const Scenario& scenario, const LaunchEnvironment& env) {
    if (env.executable.empty()) {
        return "jorek_model" + std::to_string(scenario.model_id);
    }
    if (env.executable.find('/') != std::string::npos) {
        return fs::absolute(env.executable).lexically_normal().string();
    }
    return env.executable;
}

std::string step_command(const std::string& namelist, const std::string& launcher, const std::string& exe,
                         const std::string& prerun, std::size_t k) {
    std::string cmd;
    if (!prerun.empty()) {
        cmd += prerun + " && ";
    }
    cmd += "printf '%s\\n'";
    std::istringstream lines(namelist);
    std::string line;
    while (std::getline(lines, line)) {
        cmd += " " + shell_quote(line);
    }
    cmd += " | ";
    if (!launcher.empty()) {
        cmd += launcher + " ";
    }
    cmd += exe + " > " + step_log_name(k) + " 2>&1";
    return cmd;
}

std::string compile_line(const Scenario& scenario, const LaunchEnvironment& env) {
    return env.compile_command + " " + std::to_string(scenario.model_id) + " > compile.log 2>&1";
}

/// Runs `command` under /bin/sh with `cwd` as working directory.
int run_shell(const std::string& command, const fs::path& cwd) {
    const pid_t pid = fork();
    if (pid < 0) {
        throw Error(ErrorCode::IoFailure, std::string("fork: ") + std::strerror(errno));
    }
    if (pid == 0) {
        if (chdir(cwd.c_str()) != 0) {
            _exit(127);
        }
        execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
        _exit(127);
    }
    int status = 0;
    while (waitpid(pid, &status, 0) < 0) {
        if (errno != EINTR) {
            throw Error(ErrorCode::IoFailure, std::string("waitpid: ") + std::strerror(errno));
        }
    }
    if (WIFEXITED(status)) {
        return WEXITSTATUS(status);
    }
    return 128 + (WIFSIGNALED(status) ? WTERMSIG(status) : 0);
}

std::string tail_of(const fs::path& file, std::size_t max_lines = 20) {
    std::ifstream in(file);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        lines.push_back(line);
    }
    std::string out;
    const std::size_t first = lines.size() > max_lines ? lines.size() - max_lines : 0;
    for (std::size_t i = first; i < lines.size(); ++i) {
        out += lines[i] + "\n";
    }
    return out;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
    if (!out) {
        throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
    }
}

struct RunMeta {
    const Scenario& scenario;
    const LaunchEnvironment& env;
    std::string prefix;
    std::string executable;
    std::size_t total_steps;
    std::size_t completed_steps;

    std::string render() const {
        std::string out;
        out += "model_id = " + std::to_string(scenario.model_id) + "\n";
        out += "prefix = " + prefix + "\n";
        out += "dry_run = " + std::string(env.dry_run ? "true" : "false") + "\n";
        out += "compile_first = " + std::string(env.compile_first ? "true" : "false") + "\n";
        if (!env.compile_first) {
            out += "compile_note = not compiled by this launch; the executable was built beforehand by the user\n";
        } else {
            out += "compile_command = " + env.compile_command + "\n";
        }
        out += "prerun = " + env.prerun + "\n";
        out += "mpirun = " + env.mpirun + "\n";
        out += "basedir = " + env.basedir.string() + "\n";
        out += "executable = " + executable + "\n";
        out += "total_steps = " + std::to_string(total_steps) + "\n";
        out += "completed_steps = " + std::to_string(completed_steps) + "\n";
        return out;
    }
};

std::size_t read_completed_steps(const fs::path& dir) {
    const auto meta = dir / kRunMetaName;
    if (!fs::is_regular_file(meta)) {
        return 0;
    }
    const auto doc = parse_key_value(read_text_file(meta.string()), ErrorCode::IoFailure);
    const auto raw = doc.root().find("completed_steps");
    const auto v = raw ? parse_integer(*raw) : std::nullopt;
    return v && *v > 0 ? static_cast<std::size_t>(*v) : 0;
}

/// Exclusive ownership of a run directory for the duration of a launch.
class DirectoryLock {
public:
    explicit DirectoryLock(fs::path path) : path_(std::move(path)) {
        fd_ = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
        if (fd_ < 0) {
            throw Error(ErrorCode::DirectoryLocked, path_.parent_path().string() + " is being launched already");
        }
    }
    ~DirectoryLock() {
        ::close(fd_);
        std::error_code ec;
        fs::remove(path_, ec);
    }
    DirectoryLock(const DirectoryLock&) = delete;
    DirectoryLock& operator=(const DirectoryLock&) = delete;

private:
    fs::path path_;
    int fd_ = -1;
};

}  // namespace

LaunchEnvironment LaunchEnvironment::from_environment() {
    LaunchEnvironment env;
    env.prerun = env_or("PRERUN", "");
    env.mpirun = env_or("MPIRUN", "");
    env.basedir = env_or("BASEDIR", ".");
    env.executable = env_or("SIMREGRESS_EXE", "");
    env.compile_command = env_or("SIMREGRESS_COMPILE", "");
    env.compile_first = !env.compile_command.empty();
    return env;
}

std::string step_log_name(std::size_t k) {
    return "out_loop" + std::to_string(k);
}

std::string step_namelist(const Scenario& scenario, const ExecutionStep& step) {
    std::string out = "&in1\n";
    out += "  restart = " + fortran_bool(step.restart_from.has_value()) + "\n";
    if (step.subsequence) {
        out += "  tstep_n = " + join_reals(step.subsequence->tstep_n) + "\n";
        out += "  nstep_n = " + join_ints(step.subsequence->nstep_n) + "\n";
    } else {
        out += "  nstep = 0\n";
    }
    for (const auto& [key, value] : scenario.input_params) {
        out += "  " + key + " = " + value + "\n";
    }
    out += "/\n";
    return out;
}

std::string launch_script(const Scenario& scenario, const ExecutionPlan& plan, const LaunchEnvironment& env) {
    const std::string exe = resolved_executable(scenario, env);
    std::string out = "#!/bin/sh\n";
    out += "# model " + std::to_string(scenario.model_id) + ": " + std::to_string(plan.steps.size()) +
           " chained executions\n";
    out += "cd \"$(dirname \"$0\")\" || exit 1\n";
    if (env.compile_first) {
        out += compile_line(scenario, env) + " || exit 1\n";
    }
    for (std::size_t k = 1; k <= plan.steps.size(); ++k) {
        const auto& step = plan.steps[k - 1];
        out += "# execution " + std::to_string(k) + ": " + std::string(to_string(step.kind)) +
               " n_tor=" + std::to_string(step.n_tor) + "\n";
        out += step_command(step_namelist(scenario, step), env.mpirun, exe, env.prerun, k) + " || exit " +
               std::to_string(k) + "\n";
    }
    return out;
}

RunDirectory launch(const Scenario& scenario, const LaunchEnvironment& env, const std::string& dir_prefix,
                    bool resume) {
    const ExecutionPlan plan = plan_executions(scenario);
    if (!fs::is_directory(env.basedir)) {
        throw Error(ErrorCode::IoFailure, "BASEDIR " + env.basedir.string() + " is not a directory");
    }
    if (!env.dry_run && ::access(env.basedir.c_str(), W_OK) != 0) {
        throw Error(ErrorCode::IoFailure, "BASEDIR " + env.basedir.string() + " is not writable");
    }
    if (!env.dry_run && env.executable.empty()) {
        throw Error(ErrorCode::IoFailure, "no simulation executable configured (SIMREGRESS_EXE)");
    }

    RunDirectory run;
    run.path = env.basedir / (dir_prefix + std::to_string(scenario.model_id));
    run.total_steps = plan.steps.size();

    std::size_t first_step = 1;
    if (fs::exists(run.path)) {
        if (!resume) {
            throw Error(ErrorCode::DirectoryExists, run.path.string());
        }
        first_step = read_completed_steps(run.path) + 1;
    } else {
        fs::create_directory(run.path);
    }
    DirectoryLock lock(run.path / kLockName);

    const std::string exe = resolved_executable(scenario, env);
    RunMeta meta{scenario, env, dir_prefix, exe, plan.steps.size(), first_step - 1};
    write_file(run.path / kLaunchScriptName, launch_script(scenario, plan, env));
    fs::permissions(run.path / kLaunchScriptName, fs::perms::owner_exec | fs::perms::group_exec,
                    fs::perm_options::add);
    write_file(run.path / kRunMetaName, meta.render());
    run.completed_steps = first_step - 1;
    if (env.dry_run) {
        return run;
    }

    if (env.compile_first) {
        const int rc = run_shell(compile_line(scenario, env), run.path);
        if (rc != 0) {
            throw Error(ErrorCode::CompileFailed,
                        "exit status " + std::to_string(rc) + "\n" + tail_of(run.path / "compile.log"));
        }
    }
    for (std::size_t k = first_step; k <= plan.steps.size(); ++k) {
        const auto& step = plan.steps[k - 1];
        const int rc = run_shell(step_command(step_namelist(scenario, step), env.mpirun, exe, env.prerun, k), run.path);
        if (rc != 0) {
            throw Error(ErrorCode::StepFailed, "execution " + std::to_string(k) + " exit status " +
                                                   std::to_string(rc) + "\n" + tail_of(run.path / step_log_name(k)));
        }
        run.completed_steps = k;
        meta.completed_steps = k;
        write_file(run.path / kRunMetaName, meta.render());
    }
    return run;
}

}  // namespace simregress
