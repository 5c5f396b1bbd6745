#include "simregress/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>

#include "simregress/error.hpp"
#include "simregress/keyvalue.hpp"
#include "simregress/text.hpp"

#ifndef SIMREGRESS_REGISTRY_DIR
#define SIMREGRESS_REGISTRY_DIR "registry"
#endif

namespace simregress {

namespace {

[[noreturn]] void invalid(const std::string& reason) {
    throw Error(ErrorCode::InvalidScenarioFile, reason);
}

std::optional<std::string> lookup(const ParamList& params, const std::string& name) {
    for (const auto& [key, value] : params) {
        if (key == name) {
            return value;
        }
    }
    return std::nullopt;
}

double real_value(const std::string& key, const std::string& raw) {
    const auto v = parse_real(raw);
    if (!v || !std::isfinite(*v)) {
        invalid(key + ": not a number: '" + raw + "'");
    }
    return *v;
}

long long integer_value(const std::string& key, const std::string& raw) {
    const auto v = parse_integer(raw);
    if (!v) {
        invalid(key + ": not an integer: '" + raw + "'");
    }
    return *v;
}

bool is_environment_key(std::string key) {
    std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return std::toupper(c); });
    return key == "PRERUN" || key == "MPIRUN" || key == "BASEDIR" || key == "OMP_NUM_THREADS";
}

void check_n_tor(long long n_tor, const std::string& where) {
    if (n_tor < 1 || n_tor % 2 == 0) {
        invalid(where + ": n_tor must be a positive odd number, got " + std::to_string(n_tor));
    }
}

std::string join(const std::vector<double>& values) {
    std::string out;
    for (double v : values) {
        out += (out.empty() ? "" : " ") + format_short(v);
    }
    return out;
}

std::string join(const std::vector<long long>& values) {
    std::string out;
    for (long long v : values) {
        out += (out.empty() ? "" : " ") + std::to_string(v);
    }
    return out;
}

}  // namespace

std::optional<std::string> Scenario::hardcoded(const std::string& name) const {
    return lookup(hardcoded_params, name);
}

std::optional<std::string> Scenario::input(const std::string& name) const {
    return lookup(input_params, name);
}

int Scenario::n_tor() const {
    const auto raw = hardcoded("n_tor");
    return raw ? static_cast<int>(parse_integer(*raw).value_or(1)) : 1;
}

bool Scenario::xpoint() const {
    auto raw = input("xpoint").value_or(".f.");
    std::transform(raw.begin(), raw.end(), raw.begin(), [](unsigned char c) { return std::tolower(c); });
    return raw == ".t." || raw == ".true." || raw == "t" || raw == "true";
}

std::filesystem::path default_registry_dir() {
    if (const char* env = std::getenv("SIMREGRESS_REGISTRY"); env != nullptr && *env != '\0') {
        return env;
    }
    return SIMREGRESS_REGISTRY_DIR;
}

Scenario load_scenario(const std::string& source, const std::filesystem::path& registry) {
    const bool is_id = !source.empty() && std::all_of(source.begin(), source.end(),
                                                       [](unsigned char c) { return std::isdigit(c); });
    if (is_id) {
        const auto path = registry / ("model" + source + ".scn");
        if (!std::filesystem::is_regular_file(path)) {
            throw Error(ErrorCode::UnknownModel, "model " + source + " is not in " + registry.string());
        }
        Scenario s = parse_scenario(read_text_file(path.string()));
        if (std::to_string(s.model_id) != source) {
            invalid(path.string() + " declares model_id " + std::to_string(s.model_id));
        }
        return s;
    }
    if (!std::filesystem::is_regular_file(source)) {
        invalid("no such scenario file: " + source);
    }
    return parse_scenario(read_text_file(source));
}

Scenario parse_scenario(const std::string& text) {
    const auto doc = parse_key_value(text, ErrorCode::InvalidScenarioFile);
    Scenario s;

    for (const auto& section : doc.sections) {
        for (const auto& [key, value] : section.entries) {
            if (is_environment_key(key)) {
                invalid("'" + key + "' is a launch-environment setting and cannot appear in a scenario");
            }
        }
    }

    const auto& root = doc.root();
    const auto model = root.find("model_id");
    if (!model) {
        invalid("missing model_id");
    }
    s.model_id = static_cast<int>(integer_value("model_id", *model));
    if (s.model_id <= 0) {
        invalid("model_id must be positive");
    }

    if (const auto* hard = doc.first("hardcoded")) {
        s.hardcoded_params = hard->entries;
    }
    if (const auto* input = doc.first("input")) {
        s.input_params = input->entries;
    }
    if (const auto n_tor = s.hardcoded("n_tor")) {
        check_n_tor(integer_value("n_tor", *n_tor), "[hardcoded]");
    }

    if (const auto schedule = root.find("n_tor_schedule")) {
        for (auto token : split_whitespace(*schedule)) {
            const auto colon = token.find(':');
            if (colon == std::string_view::npos) {
                invalid("n_tor_schedule entries are <execution>:<n_tor>, got '" + std::string(token) + "'");
            }
            const long long index = integer_value("n_tor_schedule", std::string(token.substr(0, colon)));
            const long long n_tor = integer_value("n_tor_schedule", std::string(token.substr(colon + 1)));
            if (index < 1) {
                invalid("n_tor_schedule execution indices start at 1");
            }
            check_n_tor(n_tor, "n_tor_schedule");
            s.n_tor_schedule.push_back({static_cast<std::size_t>(index), static_cast<int>(n_tor)});
        }
        std::sort(s.n_tor_schedule.begin(), s.n_tor_schedule.end(),
                  [](const NtorChange& a, const NtorChange& b) { return a.execution_index < b.execution_index; });
    }

    if (const auto* ramp = doc.first("ramp")) {
        if (const auto v = ramp->find("tstep_min")) {
            s.ramp.tstep_min = real_value("tstep_min", *v);
        }
        if (const auto v = ramp->find("factor")) {
            s.ramp.factor = real_value("factor", *v);
        }
        if (const auto v = ramp->find("nstep_per_level")) {
            s.ramp.nstep_per_level = integer_value("nstep_per_level", *v);
        }
        if (!(s.ramp.tstep_min > 0.0) || !(s.ramp.factor > 1.0) || s.ramp.nstep_per_level < 1) {
            invalid("[ramp] needs tstep_min > 0, factor > 1, nstep_per_level >= 1");
        }
    }

    for (const auto* block : doc.all("subsequence")) {
        Subsequence sub;
        const auto tsteps = block->find("tstep_n");
        const auto nsteps = block->find("nstep_n");
        if (!tsteps || !nsteps) {
            invalid("[subsequence] at line " + std::to_string(block->line) + " needs tstep_n and nstep_n");
        }
        for (auto t : split_whitespace(*tsteps)) {
            sub.tstep_n.push_back(real_value("tstep_n", std::string(t)));
        }
        for (auto n : split_whitespace(*nsteps)) {
            sub.nstep_n.push_back(integer_value("nstep_n", std::string(n)));
        }
        try {
            sub.validate();
        } catch (const Error& e) {
            invalid("[subsequence] at line " + std::to_string(block->line) + ": " + e.what());
        }
        s.subsequences.push_back(std::move(sub));
    }
    if (s.subsequences.empty()) {
        invalid("a scenario needs at least one [subsequence]");
    }

    if (const auto* metric = doc.first("metric")) {
        auto& m = s.metric_defaults;
        if (const auto v = metric->find("t_start")) {
            m.t_start = real_value("t_start", *v);
        }
        if (const auto v = metric->find("t_end")) {
            m.t_end = real_value("t_end", *v);
        }
        if (const auto v = metric->find("thr")) {
            m.thr = real_value("thr", *v);
        }
        if (const auto v = metric->find("time_match_tol")) {
            m.time_match_tol = real_value("time_match_tol", *v);
        }
        if (const auto v = metric->find("quantities")) {
            m.quantities.clear();
            for (auto q : split_whitespace(*v)) {
                try {
                    m.quantities.push_back(parse_quantity(q));
                } catch (const Error& e) {
                    invalid(e.what());
                }
            }
        }
        if (const auto v = metric->find("modes")) {
            m.modes.clear();
            for (auto mode : split_whitespace(*v)) {
                m.modes.push_back(static_cast<int>(integer_value("modes", std::string(mode))));
            }
        }
    } else {
        invalid("missing [metric] section");
    }
    try {
        s.metric_defaults.validate();
    } catch (const Error& e) {
        invalid(std::string("[metric]: ") + e.what());
    }
    return s;
}

std::string format_scenario(const Scenario& s) {
    std::string out = "model_id = " + std::to_string(s.model_id) + "\n";
    if (!s.n_tor_schedule.empty()) {
        out += "n_tor_schedule =";
        for (const auto& c : s.n_tor_schedule) {
            out += " " + std::to_string(c.execution_index) + ":" + std::to_string(c.n_tor);
        }
        out += "\n";
    }
    out += "\n[hardcoded]\n";
    for (const auto& [k, v] : s.hardcoded_params) {
        out += k + " = " + v + "\n";
    }
    out += "\n[input]\n";
    for (const auto& [k, v] : s.input_params) {
        out += k + " = " + v + "\n";
    }
    out += "\n[ramp]\ntstep_min = " + format_short(s.ramp.tstep_min) + "\nfactor = " + format_short(s.ramp.factor) +
           "\nnstep_per_level = " + std::to_string(s.ramp.nstep_per_level) + "\n";
    for (const auto& sub : s.subsequences) {
        out += "\n[subsequence]\ntstep_n = " + join(sub.tstep_n) + "\nnstep_n = " + join(sub.nstep_n) + "\n";
    }
    const auto& m = s.metric_defaults;
    out += "\n[metric]\nt_start = " + format_short(m.t_start) + "\nt_end = " + format_short(m.t_end) +
           "\nthr = " + format_short(m.thr) + "\ntime_match_tol = " + format_short(m.time_match_tol) + "\nquantities =";
    for (auto q : m.quantities) {
        out += " " + std::string(to_string(q));
    }
    out += "\nmodes =";
    for (int mode : m.modes) {
        out += " " + std::to_string(mode);
    }
    out += "\n";
    return out;
}

std::string_view to_string(StepKind kind) {
    switch (kind) {
        case StepKind::equilibrium: return "equilibrium";
        case StepKind::axisymmetric_establish: return "axisymmetric_establish";
        case StepKind::evolve: return "evolve";
    }
    return "unknown";
}

long long ExecutionPlan::evolve_steps() const {
    long long total = 0;
    for (const auto& step : steps) {
        if (step.kind == StepKind::evolve) {
            total += step.subsequence->total_steps();
        }
    }
    return total;
}

double ExecutionPlan::evolve_duration() const {
    double total = 0.0;
    for (const auto& step : steps) {
        if (step.kind == StepKind::evolve) {
            total += step.subsequence->duration();
        }
    }
    return total;
}

ExecutionPlan plan_executions(const Scenario& scenario) {
    if (scenario.subsequences.empty()) {
        invalid("a scenario needs at least one subsequence");
    }
    for (const auto& sub : scenario.subsequences) {
        sub.validate();
    }
    const std::size_t chain = 2 + scenario.subsequences.size();
    if (chain < kMinChainLength || chain > kMaxChainLength) {
        throw Error(ErrorCode::ScheduleIndexOutOfRange,
                    "execution chain of " + std::to_string(chain) + " runs is outside [" +
                        std::to_string(kMinChainLength) + ", " + std::to_string(kMaxChainLength) + "]");
    }
    for (const auto& change : scenario.n_tor_schedule) {
        if (change.execution_index < 1 || change.execution_index > scenario.subsequences.size()) {
            throw Error(ErrorCode::ScheduleIndexOutOfRange,
                        "n_tor change at evolve execution " + std::to_string(change.execution_index) + ", plan has " +
                            std::to_string(scenario.subsequences.size()));
        }
    }

    ExecutionPlan plan;
    plan.steps.push_back({StepKind::equilibrium, 1, std::nullopt, std::nullopt});

    Subsequence ramp;
    const double target = scenario.subsequences.front().tstep_n.front();
    for (double dt = scenario.ramp.tstep_min; dt < target; dt *= scenario.ramp.factor) {
        ramp.tstep_n.push_back(dt);
        ramp.nstep_n.push_back(scenario.ramp.nstep_per_level);
    }
    ramp.tstep_n.push_back(target);
    ramp.nstep_n.push_back(scenario.ramp.nstep_per_level);
    plan.steps.push_back({StepKind::axisymmetric_establish, 1, ramp, 1});

    int n_tor = scenario.n_tor();
    for (std::size_t i = 0; i < scenario.subsequences.size(); ++i) {
        for (const auto& change : scenario.n_tor_schedule) {
            if (change.execution_index == i + 1) {
                n_tor = change.n_tor;
            }
        }
        plan.steps.push_back({StepKind::evolve, n_tor, scenario.subsequences[i], plan.steps.size()});
    }
    return plan;
}

}  // namespace simregress
