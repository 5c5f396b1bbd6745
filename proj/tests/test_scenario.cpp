#include <doctest.h>

#include <random>

#include "simregress/scenario.hpp"
#include "simregress/toysim.hpp"
#include "support.hpp"

using namespace simregress;

namespace {

const char* kMinimal =
    "model_id = 500\n"
    "[hardcoded]\nn_tor = 3\n"
    "[input]\nxpoint = .T.\n"
    "[subsequence]\ntstep_n = 1\nnstep_n = 10\n"
    "[metric]\nt_start = 2\nt_end = 8\n";

Scenario with_subsequences(std::size_t count) {
    Scenario s = parse_scenario(kMinimal);
    s.subsequences.assign(count, Subsequence{{1.0}, {2}});
    return s;
}

Scenario random_scenario(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> count(1, 7);
    std::uniform_int_distribution<int> pairs(1, 3);
    std::uniform_real_distribution<double> dt(0.01, 50.0);
    std::uniform_int_distribution<long long> n(1, 200);
    Scenario s = parse_scenario(kMinimal);
    s.subsequences.clear();
    const int k = count(rng);
    for (int i = 0; i < k; ++i) {
        Subsequence sub;
        const int p = pairs(rng);
        for (int j = 0; j < p; ++j) {
            sub.tstep_n.push_back(dt(rng));
            sub.nstep_n.push_back(n(rng));
        }
        s.subsequences.push_back(sub);
    }
    return s;
}

}  // namespace

TEST_CASE("registry scenarios load") {
    for (const char* id : {"199", "302", "303"}) {
        CAPTURE(id);
        const auto s = load_scenario(id, testing::registry());
        CHECK(std::to_string(s.model_id) == id);
        CHECK_FALSE(s.subsequences.empty());
        s.metric_defaults.validate();
        const auto plan = plan_executions(s);
        CHECK(plan.steps.size() >= 3);
    }
    const auto m199 = load_scenario("199", testing::registry());
    CHECK_FALSE(m199.xpoint());
    CHECK(m199.n_tor() == 3);
    CHECK(m199.metric_defaults.t_start == 30000);
    CHECK(m199.metric_defaults.t_end == 56000);
    CHECK(load_scenario("302", testing::registry()).xpoint());
    const auto m303 = load_scenario("303", testing::registry());
    REQUIRE(m303.n_tor_schedule.size() == 1);
    CHECK(m303.n_tor_schedule[0] == NtorChange{2, 5});
}

TEST_CASE("load_scenario errors") {
    CHECK_ERROR(load_scenario("777", testing::registry()), ErrorCode::UnknownModel);
    CHECK_ERROR(load_scenario("/nonexistent/model.scn", testing::registry()), ErrorCode::InvalidScenarioFile);
}

TEST_CASE("scenario files from a path") {
    testing::TempDir dir;
    testing::spit(dir / "mine.scn", kMinimal);
    const auto s = load_scenario((dir / "mine.scn").string(), testing::registry());
    CHECK(s.model_id == 500);
    CHECK(s.xpoint());
    CHECK(s.input("xpoint") == ".T.");
    CHECK_FALSE(s.input("missing"));
}

TEST_CASE("parse_scenario rejects bad content") {
    const std::string base = kMinimal;
    CHECK_ERROR(parse_scenario("[metric]\nt_start = 0\nt_end = 1\n"), ErrorCode::InvalidScenarioFile);
    CHECK_ERROR(parse_scenario(base + "[input]\nMPIRUN = mpirun -np 4\n"), ErrorCode::InvalidScenarioFile);
    CHECK_ERROR(parse_scenario(base + "[hardcoded]\nomp_num_threads = 8\n"), ErrorCode::InvalidScenarioFile);
    CHECK_ERROR(parse_scenario("model_id = 5\n[subsequence]\ntstep_n = 1\nnstep_n = 0\n[metric]\nt_start=0\nt_end=1\n"),
                ErrorCode::InvalidScenarioFile);
    CHECK_ERROR(parse_scenario("model_id = 5\n[metric]\nt_start=0\nt_end=1\n"), ErrorCode::InvalidScenarioFile);
    CHECK_ERROR(parse_scenario("model_id = 5\nn_tor_schedule = 1:4\n[subsequence]\ntstep_n=1\nnstep_n=1\n"
                               "[metric]\nt_start=0\nt_end=1\n"),
                ErrorCode::InvalidScenarioFile);
    CHECK_ERROR(parse_scenario("model_id = 5\n[hardcoded]\nn_tor = 2\n[subsequence]\ntstep_n=1\nnstep_n=1\n"
                               "[metric]\nt_start=0\nt_end=1\n"),
                ErrorCode::InvalidScenarioFile);
    CHECK_ERROR(parse_scenario("model_id = x\n"), ErrorCode::InvalidScenarioFile);
}

TEST_CASE("format_scenario round trip") {
    for (const char* id : {"199", "302", "303"}) {
        const auto s = load_scenario(id, testing::registry());
        const auto back = parse_scenario(format_scenario(s));
        CHECK(back.model_id == s.model_id);
        CHECK(back.hardcoded_params == s.hardcoded_params);
        CHECK(back.input_params == s.input_params);
        CHECK(back.subsequences == s.subsequences);
        CHECK(back.n_tor_schedule == s.n_tor_schedule);
        CHECK(back.metric_defaults.t_start == s.metric_defaults.t_start);
        CHECK(back.metric_defaults.modes == s.metric_defaults.modes);
        CHECK(back.metric_defaults.quantities == s.metric_defaults.quantities);
        CHECK(format_scenario(back) == format_scenario(s));
    }
}

TEST_CASE("plan structure") {
    const auto s = load_scenario("303", testing::registry());
    const auto plan = plan_executions(s);
    REQUIRE(plan.steps.size() == 5);
    CHECK(plan.steps[0].kind == StepKind::equilibrium);
    CHECK_FALSE(plan.steps[0].restart_from);
    CHECK(plan.steps[1].kind == StepKind::axisymmetric_establish);
    CHECK(plan.steps[1].n_tor == 1);
    CHECK(plan.steps[1].restart_from == 1);
    CHECK(plan.steps[2].n_tor == 3);
    CHECK(plan.steps[3].n_tor == 5);
    CHECK(plan.steps[4].n_tor == 5);
    CHECK(plan.steps[4].restart_from == 4);
    for (std::size_t i = 2; i < plan.steps.size(); ++i) {
        CHECK(plan.steps[i].kind == StepKind::evolve);
        CHECK(*plan.steps[i].subsequence == s.subsequences[i - 2]);
    }
}

TEST_CASE("axisymmetric ramp doubles up to the first time step") {
    auto s = parse_scenario(kMinimal);
    s.ramp = RampSpec{0.1, 2.0, 3};
    s.subsequences = {Subsequence{{1.0, 5.0}, {4, 4}}};
    const auto plan = plan_executions(s);
    const auto& ramp = *plan.steps[1].subsequence;
    const std::vector<double> expected{0.1, 0.2, 0.4, 0.8, 1.0};
    REQUIRE(ramp.tstep_n.size() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
        CHECK(ramp.tstep_n[i] == doctest::Approx(expected[i]).scale(0));
        CHECK(ramp.nstep_n[i] == 3);
    }
}

TEST_CASE("chain length bounds") {
    CHECK(plan_executions(with_subsequences(1)).steps.size() == 3);
    CHECK(plan_executions(with_subsequences(7)).steps.size() == 9);
    CHECK_ERROR(plan_executions(with_subsequences(8)), ErrorCode::ScheduleIndexOutOfRange);
    CHECK_ERROR(plan_executions(with_subsequences(0)), ErrorCode::InvalidScenarioFile);
}

TEST_CASE("schedule indices must fall inside the evolve chain") {
    auto s = with_subsequences(2);
    s.n_tor_schedule = {{3, 5}};
    CHECK_ERROR(plan_executions(s), ErrorCode::ScheduleIndexOutOfRange);
    s.n_tor_schedule = {{0, 5}};
    CHECK_ERROR(plan_executions(s), ErrorCode::ScheduleIndexOutOfRange);
    s.n_tor_schedule = {{2, 1}};
    const auto plan = plan_executions(s);
    CHECK(plan.steps[2].n_tor == 3);
    CHECK(plan.steps[3].n_tor == 1);
}

TEST_CASE("property: plan totals match the subsequences and the toy simulator") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        const auto s = random_scenario(rng);
        const auto plan = plan_executions(s);
        long long steps = 0;
        double duration = 0.0;
        for (const auto& sub : s.subsequences) {
            for (std::size_t i = 0; i < sub.tstep_n.size(); ++i) {
                steps += sub.nstep_n[i];
                duration += sub.tstep_n[i] * static_cast<double>(sub.nstep_n[i]);
            }
        }
        CHECK(plan.evolve_steps() == steps);
        CHECK(plan.evolve_duration() == doctest::Approx(duration).scale(0).epsilon(1e-12));

        ToyConfig toy;
        toy.steps = concatenate(s.subsequences);
        toy.noise_amp = 0.0;
        toy.noise_window_end = 0.0;
        toy.gamma = {1e-6, 1e-6};
        const auto series = simulate(toy);
        CHECK(static_cast<long long>(series.times.size()) == steps + 1);
        CHECK(series.times.back() == doctest::Approx(plan.evolve_duration()).scale(0).epsilon(1e-9));
        CHECK(plan_executions(s).steps.size() == plan.steps.size());
    }
}
