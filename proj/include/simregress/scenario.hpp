#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "simregress/metric_spec.hpp"
#include "simregress/subsequence.hpp"

namespace simregress {

using ParamList = std::vector<std::pair<std::string, std::string>>;

/// n_tor takes `n_tor` from this evolve execution on (1-based over evolve steps).
struct NtorChange {
    std::size_t execution_index;
    int n_tor;

    bool operator==(const NtorChange&) const = default;
};

/// Time steps of the axisymmetric establishment run: a factor-2 geometric
/// ramp from tstep_min up to the first subsequence's first time step.
struct RampSpec {
    double tstep_min = 0.01;
    double factor = 2.0;
    long long nstep_per_level = 5;
};

/// A replayable reference scenario. Compiled-in parameters (category A) and
/// standard-input parameters (category B) are kept apart; the launch
/// environment (category C) never appears here.
struct Scenario {
    int model_id = 0;
    ParamList hardcoded_params;
    ParamList input_params;
    std::vector<Subsequence> subsequences;
    std::vector<NtorChange> n_tor_schedule;
    RampSpec ramp;
    MetricSpec metric_defaults;

    std::optional<std::string> hardcoded(const std::string& name) const;
    std::optional<std::string> input(const std::string& name) const;
    int n_tor() const;
    bool xpoint() const;
};

/// Directory of `model<id>.scn` files: $SIMREGRESS_REGISTRY, else the
/// registry shipped next to the sources.
std::filesystem::path default_registry_dir();

/// `source` is either a registered model id ("302") or a scenario file path.
Scenario load_scenario(const std::string& source, const std::filesystem::path& registry = default_registry_dir());
Scenario parse_scenario(const std::string& text);
std::string format_scenario(const Scenario& scenario);

enum class StepKind { equilibrium, axisymmetric_establish, evolve };

std::string_view to_string(StepKind kind);

struct ExecutionStep {
    StepKind kind;
    int n_tor;
    std::optional<Subsequence> subsequence;
    /// 1-based index of the step whose checkpoint this one restarts from.
    std::optional<std::size_t> restart_from;
};

struct ExecutionPlan {
    std::vector<ExecutionStep> steps;

    long long evolve_steps() const;
    double evolve_duration() const;
};

inline constexpr std::size_t kMinChainLength = 2;
inline constexpr std::size_t kMaxChainLength = 9;

/// [equilibrium] ++ [axisymmetric ramp] ++ one evolve step per subsequence,
/// with n_tor following the schedule.
ExecutionPlan plan_executions(const Scenario& scenario);

}  // namespace simregress
