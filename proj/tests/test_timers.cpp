#include <doctest.h>

#include <cmath>

#include "simregress/text.hpp"
#include "simregress/timers.hpp"
#include "support.hpp"

using namespace simregress;

namespace {

std::string bench(const std::string& keyword, const std::string& log, std::optional<std::size_t> limit,
                  const std::vector<std::string>& dirs) {
    return timing_bench(TimerKeyword(keyword), log, limit, dirs, testing::fixtures() / "benchmark");
}

std::vector<ScalingRun> scaling_runs() {
    const std::pair<const char*, ScalingConfig> configs[] = {
        {"c012", {12, 1, 4, 3}},  {"c024", {24, 2, 4, 6}},     {"c048", {48, 4, 4, 12}},
        {"c096", {96, 8, 8, 12}}, {"c192", {192, 16, 16, 12}},
    };
    std::vector<ScalingRun> runs;
    for (const auto& [dir, config] : configs) {
        runs.push_back({config, testing::fixtures() / "scaling" / dir, false});
    }
    return runs;
}

}  // namespace

TEST_CASE("parse_timer_line plain and comma shapes") {
    const auto plain = parse_timer_line("  0              # Elapsed time ITERATION :          22.4025180");
    REQUIRE(plain);
    CHECK(plain->keyword == "ITERATION");
    CHECK(plain->rank == 0);
    CHECK(plain->elapsed_text == "22.4025180");
    CHECK(plain->elapsed == 22.402518);

    const auto comma = parse_timer_line("  0                ## Elapsed time, facto :          36.4806480");
    REQUIRE(comma);
    CHECK(comma->keyword == "facto");
    CHECK(comma->elapsed_text == "36.4806480");

    const auto ranked = parse_timer_line(" 12 # Elapsed time gmres/solve : 3.5");
    REQUIRE(ranked);
    CHECK(ranked->rank == 12);
    CHECK(ranked->keyword == "gmres/solve");
}

TEST_CASE("parse_timer_line rejects other lines") {
    CHECK_FALSE(parse_timer_line(" time step 3"));
    CHECK_FALSE(parse_timer_line("  0 # Elapsed time ITERATION :"));
    CHECK_FALSE(parse_timer_line("  0 # Elapsed time ITERATION : soon"));
    CHECK_FALSE(parse_timer_line("  0 # Elapsed time ITERATION : -1.0"));
    CHECK_FALSE(parse_timer_line("  x # Elapsed time ITERATION : 1.0"));
    CHECK_FALSE(parse_timer_line("Elapsed time # ITERATION : 1.0"));
}

TEST_CASE("format_timer_line reproduces the code's layout") {
    CHECK(format_timer_line("ITERATION", 22.402518) ==
          "  0              # Elapsed time ITERATION :          22.4025180");
    CHECK(format_timer_line("ITERATION", 7.223) == "  0              # Elapsed time ITERATION :           7.2230000");
    CHECK(format_timer_line("facto", 143.541565, TimerLineStyle::comma) ==
          "  0                ## Elapsed time, facto :         143.5415650");
    CHECK(format_timer_line("gmres/solve", 3.803133) ==
          "  0            # Elapsed time gmres/solve :           3.8031330");
    CHECK(format_timer_line("construct_matrix", 11.953) ==
          "  0       # Elapsed time construct_matrix :          11.9530000");
}

TEST_CASE("property: format then parse keeps name, rank and value") {
    for (int rank : {0, 3, 127}) {
        for (double v : {0.0, 0.002, 1.5, 22.402518, 12345.6789012}) {
            for (const char* name : {"ITERATION", "facto", "coicsr", "a_very_long_timer_name_beyond_padding"}) {
                const auto style = std::string(name) == "facto" ? TimerLineStyle::comma : TimerLineStyle::plain;
                const auto line = format_timer_line(name, v, style, rank);
                const auto record = parse_timer_line(line);
                REQUIRE(record);
                CHECK(record->keyword == name);
                CHECK(record->rank == rank);
                CHECK(testing::rel_close(record->elapsed, v, 1e-9));
                CHECK(parse_real(record->elapsed_text) == record->elapsed);
            }
        }
    }
}

TEST_CASE("TimerKeyword validation") {
    CHECK_ERROR(TimerKeyword(""), ErrorCode::InvalidSpec);
    CHECK_ERROR(TimerKeyword("gmres solve"), ErrorCode::InvalidSpec);
    CHECK(TimerKeyword("construct_").name() == "construct_");
}

TEST_CASE("scan_log keeps the printed strings and honours limits") {
    const auto dir = testing::fixtures() / "benchmark/model199/fourmi_a";
    const auto all = scan_log(dir, "out_loop1", TimerKeyword("ITER"));
    CHECK(all.size() == 4);
    CHECK(all[0].elapsed_text == "22.4025180");
    CHECK(all[0].line_no > 0);
    CHECK(all[0].log_file == "out_loop1");
    ScanOptions three;
    three.limit = 3;
    const auto first = scan_log(dir, "out_loop1", TimerKeyword("ITER"), three);
    REQUIRE(first.size() == 3);
    CHECK(first[2].elapsed_text == "11.3435830");
    ScanOptions none;
    none.limit = 0;
    CHECK(scan_log(dir, "out_loop1", TimerKeyword("ITER"), none).empty());
}

TEST_CASE("scan_log errors and rank filtering") {
    testing::TempDir dir;
    CHECK_ERROR(scan_log(dir.path(), "out_loop1", TimerKeyword("ITER")), ErrorCode::MissingLog);
    testing::spit(dir / "out_loop1",
                  "  0 # Elapsed time ITERATION : 1.5\n"
                  "  1 # Elapsed time ITERATION : 2.5\n"
                  " step\n");
    CHECK_ERROR(scan_log(dir.path(), "out_loop1", TimerKeyword("facto")), ErrorCode::NoMatches);
    CHECK(scan_log(dir.path(), "out_loop1", TimerKeyword("ITER")).size() == 1);
    ScanOptions every;
    every.rank.reset();
    CHECK(scan_log(dir.path(), "out_loop1", TimerKeyword("ITER"), every).size() == 2);
    ScanOptions rank1;
    rank1.rank = 1;
    CHECK(scan_log(dir.path(), "out_loop1", TimerKeyword("ITER"), rank1)[0].elapsed_text == "2.5");

    testing::spit(dir / "out_loop2", "  0 # Elapsed time ITERATION : 1.5\n  0 # Elapsed time ITERATION :\n");
    try {
        scan_log(dir.path(), "out_loop2", TimerKeyword("ITER"));
        FAIL("expected MalformedTimerLine");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::MalformedTimerLine);
        CHECK(e.line() == 2);
    }
}

TEST_CASE("timing transcript: ITER on model 199") {
    const std::string expected =
        "== model199/fourmi_a ( openmpi )\n"
        "  0              # Elapsed time ITERATION :          22.4025180\n"
        "  0              # Elapsed time ITERATION :          10.5183380\n"
        "  0              # Elapsed time ITERATION :          11.3435830\n"
        "== model199/rheticus_a ( mvapich2 )\n"
        "  0              # Elapsed time ITERATION :          15.2480000\n"
        "  0              # Elapsed time ITERATION :           7.2230000\n"
        "  0              # Elapsed time ITERATION :           7.5020000\n";
    CHECK(bench("ITER", "out_loop1", 3, {"model199/fourmi_a", "model199/rheticus_a"}) == expected);
}

TEST_CASE("timing transcripts: MPI libraries on Helios") {
    CHECK(bench("gmres/solve", "out_loop5", 2, {"model302/helios_a", "model302/helios_b"}) ==
          "== model302/helios_a ( bullxmpi + FUNNELED )\n"
          "  0            # Elapsed time gmres/solve :           3.8031330\n"
          "  0            # Elapsed time gmres/solve :           3.4623600\n"
          "== model302/helios_b ( intelmpi + FUNNELED )\n"
          "  0            # Elapsed time gmres/solve :           3.4759830\n"
          "  0            # Elapsed time gmres/solve :           3.3056950\n");
    CHECK(bench("facto", "out_loop5", 1, {"model302/helios_a", "model302/helios_b"}) ==
          "== model302/helios_a ( bullxmpi + FUNNELED )\n"
          "  0                ## Elapsed time, facto :          36.4806480\n"
          "== model302/helios_b ( intelmpi + FUNNELED )\n"
          "  0                ## Elapsed time, facto :         143.5415650\n");
    CHECK(bench("ITER", "out_loop5", 5, {"model302/helios_a", "model302/helios_b"}) ==
          "== model302/helios_a ( bullxmpi + FUNNELED )\n"
          "  0              # Elapsed time ITERATION :         151.7923330\n"
          "  0              # Elapsed time ITERATION :          62.5559670\n"
          "  0              # Elapsed time ITERATION :           9.5537380\n"
          "  0              # Elapsed time ITERATION :          10.3767240\n"
          "  0              # Elapsed time ITERATION :           9.5514340\n"
          "== model302/helios_b ( intelmpi + FUNNELED )\n"
          "  0              # Elapsed time ITERATION :         260.5344900\n"
          "  0              # Elapsed time ITERATION :         167.9943480\n"
          "  0              # Elapsed time ITERATION :           9.0590700\n"
          "  0              # Elapsed time ITERATION :           9.5267600\n"
          "  0              # Elapsed time ITERATION :           9.0850900\n");
}

TEST_CASE("timing transcripts: compilers on Rheticus") {
    CHECK(bench("ITER", "out_loop2", 5, {"rheticus_gf_302", "rheticus_if_302"}) ==
          "== rheticus_gf_302 ( gfortran 4.4.6 )\n"
          "  0              # Elapsed time ITERATION :         157.0370000\n"
          "  0              # Elapsed time ITERATION :          78.8670000\n"
          "  0              # Elapsed time ITERATION :          14.6350000\n"
          "  0              # Elapsed time ITERATION :          14.9580000\n"
          "  0              # Elapsed time ITERATION :          15.1500000\n"
          "== rheticus_if_302 ( ifort 12.1 )\n"
          "  0              # Elapsed time ITERATION :         150.9672940\n"
          "  0              # Elapsed time ITERATION :          74.2307940\n"
          "  0              # Elapsed time ITERATION :           8.2149000\n"
          "  0              # Elapsed time ITERATION :           9.0045110\n"
          "  0              # Elapsed time ITERATION :           9.8495460\n");
    CHECK(bench("construct_", "out_loop2", 5, {"rheticus_gf_302", "rheticus_if_302"}) ==
          "== rheticus_gf_302 ( gfortran 4.4.6 )\n"
          "  0       # Elapsed time construct_matrix :          11.9530000\n"
          "  0       # Elapsed time construct_matrix :          11.5190000\n"
          "  0       # Elapsed time construct_matrix :          11.4940000\n"
          "  0       # Elapsed time construct_matrix :          11.4600000\n"
          "  0       # Elapsed time construct_matrix :          11.5520000\n"
          "== rheticus_if_302 ( ifort 12.1 )\n"
          "  0       # Elapsed time construct_matrix :           5.2446580\n"
          "  0       # Elapsed time construct_matrix :           4.8440020\n"
          "  0       # Elapsed time construct_matrix :           4.8604400\n"
          "  0       # Elapsed time construct_matrix :           4.8635080\n"
          "  0       # Elapsed time construct_matrix :           5.4503650\n");
}

TEST_CASE("timing transcripts: funneled solver") {
    const std::vector<std::string> dirs{"model302/fourmi_a", "model302/fourmi_b", "model302/rheticus_a",
                                        "model302/rheticus_b"};
    CHECK(bench("facto", "out_loop3", 2, dirs) ==
          "== model302/fourmi_a ( openmpi )\n"
          "  0                ## Elapsed time, facto :          64.7742300\n"
          "== model302/fourmi_b ( openmpi + FUNNELED )\n"
          "  0                ## Elapsed time, facto :          50.9117520\n"
          "== model302/rheticus_a ( mvapich2 )\n"
          "  0                ## Elapsed time, facto :          39.4410000\n"
          "== model302/rheticus_b ( mvapich2 + FUNNELED )\n"
          "  0                ## Elapsed time, facto :          35.4110000\n");
    CHECK(bench("gmres/solve", "out_loop3", 1, dirs) ==
          "== model302/fourmi_a ( openmpi )\n"
          "  0            # Elapsed time gmres/solve :           1.5070440\n"
          "== model302/fourmi_b ( openmpi + FUNNELED )\n"
          "  0            # Elapsed time gmres/solve :           4.4459140\n"
          "== model302/rheticus_a ( mvapich2 )\n"
          "  0            # Elapsed time gmres/solve :           1.3680000\n"
          "== model302/rheticus_b ( mvapich2 + FUNNELED )\n"
          "  0            # Elapsed time gmres/solve :           3.7280000\n");
}

TEST_CASE("timing_bench reports missing logs and empty results per directory") {
    const auto out = bench("ITER", "out_loop9", std::nullopt, {"model199/fourmi_a"});
    CHECK(out == "== model199/fourmi_a ( openmpi )\nmissing log file out_loop9\n");
    CHECK(bench("nonesuch", "out_loop1", std::nullopt, {"model199/fourmi_a"}) ==
          "== model199/fourmi_a ( openmpi )\nno matches\n");
    testing::TempDir dir;
    testing::spit(dir / "out_loop1", "  0 # Elapsed time ITERATION : 1.5\n");
    CHECK(timing_bench(TimerKeyword("ITER"), "out_loop1", std::nullopt, {"."}, dir.path()) ==
          "== . ( - )\n  0 # Elapsed time ITERATION : 1.5\n");
}

TEST_CASE("timing_bench is stable across calls") {
    const auto a = bench("ITER", "out_loop5", std::nullopt, {"model302/helios_a"});
    CHECK(a == bench("ITER", "out_loop5", std::nullopt, {"model302/helios_a"}));
}

TEST_CASE("scaling config parsing") {
    CHECK(parse_scaling_config("12,1,4,3") == ScalingConfig{12, 1, 4, 3});
    CHECK_ERROR(parse_scaling_config("12,1,4"), ErrorCode::InvalidSpec);
    CHECK_ERROR(parse_scaling_config("12,1,4,3,2"), ErrorCode::InvalidSpec);
    CHECK_ERROR(parse_scaling_config("12,0,4,3"), ErrorCode::InvalidSpec);
    CHECK_ERROR(parse_scaling_config("a,b,c,d"), ErrorCode::InvalidSpec);
}

TEST_CASE("scaling report on the first iteration") {
    const auto table = scaling_report(scaling_runs(), "out_loop3", 1);
    CHECK(table.baseline == 0);
    const auto& facto = table.row("facto");
    CHECK(facto.elapsed == std::vector<double>{265.8, 67.2, 41.5, 22.7, 14.5});
    CHECK(facto.speedup[0] == 1.0);
    CHECK(facto.speedup[4] == doctest::Approx(265.8 / 14.5).scale(0));
    CHECK(facto.efficiency[4] == doctest::Approx(265.8 / 14.5 * 12 / 192).scale(0));
    CHECK(table.row("ITER").elapsed == std::vector<double>{308.7, 83.4, 53.3, 31.9, 22.5});
    CHECK(table.row("coicsr").elapsed_text[0] == "0.4100000");
}

TEST_CASE("scaling report on the third iteration") {
    const auto table = scaling_report(scaling_runs(), "out_loop3", 3);
    const auto& iter = table.row("ITER");
    CHECK(iter.speedup[4] == doctest::Approx(29.9 / 3.58).scale(0));
    CHECK(std::isnan(table.row("facto").speedup[1]));
    CHECK(table.row("facto").speedup[0] == 1.0);
    CHECK(table.row("distribute").elapsed[1] == 0.004);
}

TEST_CASE("pathological runs can be excluded from the baseline") {
    auto runs = scaling_runs();
    runs[0].pathological = true;
    const auto kept = scaling_report(runs, "out_loop3", 1);
    CHECK(kept.baseline == 0);
    CHECK(kept.pathological[0]);
    const auto excluded = scaling_report(runs, "out_loop3", 1, true);
    CHECK(excluded.baseline == 1);
    const auto& facto = excluded.row("facto");
    CHECK(facto.speedup[1] == 1.0);
    CHECK(facto.speedup[4] == doctest::Approx(67.2 / 14.5).scale(0));
    CHECK(facto.efficiency[4] == doctest::Approx(67.2 / 14.5 * 24 / 192).scale(0));
    for (auto& r : runs) {
        r.pathological = true;
    }
    CHECK_ERROR(scaling_report(runs, "out_loop3", 1, true), ErrorCode::InvalidSpec);
}

TEST_CASE("scaling report errors") {
    auto runs = scaling_runs();
    CHECK_ERROR(scaling_report(runs, "out_loop3", 4), ErrorCode::IncompleteRun);
    CHECK_ERROR(scaling_report(runs, "out_loop3", 0), ErrorCode::InvalidSpec);
    CHECK_ERROR(scaling_report({runs[0]}, "out_loop3", 1), ErrorCode::InvalidSpec);
    CHECK_ERROR(scaling_report(runs, "out_loop9", 1), ErrorCode::MissingLog);
    testing::TempDir dir;
    testing::spit(dir / "out_loop3", "  0 # Elapsed time facto : 1.0\n  0 # Elapsed time ITERATION : 2.0\n");
    runs[1].run_dir = dir.path();
    CHECK_ERROR(scaling_report(runs, "out_loop3", 1), ErrorCode::IncompleteRun);
}

TEST_CASE("property: ITER dominates every component in the scaling fixtures") {
    for (std::size_t it = 1; it <= 3; ++it) {
        const auto table = scaling_report(scaling_runs(), "out_loop3", it);
        const auto& iter = table.row("ITER");
        for (const auto& row : table.rows) {
            REQUIRE(row.elapsed.size() == table.configs.size());
            REQUIRE(row.speedup.size() == table.configs.size());
            CHECK(row.speedup[table.baseline] == 1.0);
            for (std::size_t i = 0; i < row.elapsed.size(); ++i) {
                CHECK(iter.elapsed[i] >= row.elapsed[i] - 1e-6);
            }
        }
    }
}

TEST_CASE("property: ITER dominates the components of every bundled log") {
    const std::pair<const char*, const char*> logs[] = {
        {"model199/fourmi_a", "out_loop1"},   {"model199/rheticus_a", "out_loop1"}, {"model199/helios_a", "out_loop1"},
        {"model302/helios_a", "out_loop5"},   {"model302/helios_b", "out_loop5"},   {"model302/fourmi_a", "out_loop3"},
        {"model302/fourmi_b", "out_loop3"},   {"model302/rheticus_a", "out_loop3"}, {"model302/rheticus_b", "out_loop3"},
        {"rheticus_gf_302", "out_loop2"},     {"rheticus_if_302", "out_loop2"},
    };
    for (const auto& [dir, log] : logs) {
        CAPTURE(dir);
        ScanOptions all;
        const auto records = scan_log(testing::fixtures() / "benchmark" / dir, log, TimerKeyword("Elapsed"), all);
        double largest = 0.0;
        for (const auto& r : records) {
            if (r.keyword == "ITERATION") {
                CHECK(r.elapsed >= largest - 1e-6);
                largest = 0.0;
            } else {
                largest = std::max(largest, r.elapsed);
            }
        }
    }
}

TEST_CASE("scaling table renderings") {
    auto runs = scaling_runs();
    runs[0].pathological = true;
    const auto table = scaling_report(runs, "out_loop3", 1, true);
    const auto machine = format_scaling_machine(table);
    CHECK(machine.rfind("quantity c1 c2 c3 c4 c5\ncores 12 24 48 96 192\n", 0) == 0);
    CHECK(machine.find("pathological 1 0 0 0 0\nbaseline 0 1 0 0 0\n") != std::string::npos);
    CHECK(machine.find("elapsed:facto 265.8000000 67.2000000 41.5000000 22.7000000 14.5000000\n") !=
          std::string::npos);
    const auto text = render_scaling_table(table);
    CHECK(text.find("Timing in seconds for iteration 1") != std::string::npos);
    CHECK(text.find("relative to 24 cores") != std::string::npos);
}
