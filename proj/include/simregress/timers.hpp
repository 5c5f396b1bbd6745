#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace simregress {

/// Phases of one temporal iteration that the simulation code times.
inline constexpr std::array<std::string_view, 8> kTimerTaxonomy{
    "construct_matrix", "distribute", "coicsr", "analysis", "facto", "first_solve", "gmres/solve", "ITER"};

/// Search string for timer lines. Matching is by substring, so `construct_`
/// selects `construct_matrix` and `ITER` selects `ITERATION`.
class TimerKeyword {
public:
    /// Throws InvalidSpec on an empty name or one containing whitespace.
    explicit TimerKeyword(std::string name);
    const std::string& name() const { return name_; }

private:
    std::string name_;
};

/// One `<rank> #... Elapsed time[,] <name> : <seconds>` line of a run log.
struct TimerRecord {
    std::string keyword;       // timer name as printed (e.g. "ITERATION")
    int rank = 0;              // leading column of the line
    std::string elapsed_text;  // seconds exactly as printed
    double elapsed = 0.0;
    std::string line;  // the full line, verbatim
    std::string log_file;
    std::filesystem::path run_dir;
    std::size_t line_no = 0;
};

inline constexpr std::string_view kElapsedMarker = "Elapsed time";

/// nullopt when `line` is not a timer line.
std::optional<TimerRecord> parse_timer_line(std::string_view line);

enum class TimerLineStyle {
    plain,  // "# Elapsed time ITERATION :"
    comma,  // "## Elapsed time, facto :"
};

/// A timer line as the simulation code prints it: right-aligned name after
/// the rank and seconds in a 20-wide, 7-decimal field.
std::string format_timer_line(std::string_view name, double seconds, TimerLineStyle style = TimerLineStyle::plain,
                              int rank = 0);

struct ScanOptions {
    /// Keep only the first `limit` matches.
    std::optional<std::size_t> limit;
    /// Reporting rank to keep; nullopt keeps all ranks.
    std::optional<int> rank = 0;
};

/// Every line of <run_dir>/<log_file> containing both the keyword and
/// `Elapsed time`, in file order. Throws MissingLog, or NoMatches when
/// nothing matches (a limit of 0 returns an empty list instead).
std::vector<TimerRecord> scan_log(const std::filesystem::path& run_dir, const std::string& log_file,
                                  const TimerKeyword& keyword, const ScanOptions& options = {});

/// Grouped report across run directories: per directory a
/// `== <dir> ( <README Comment> )` header followed by the matching lines.
/// Directories are resolved against `base` but printed as given.
std::string timing_bench(const TimerKeyword& keyword, const std::string& log_file, std::optional<std::size_t> limit,
                         const std::vector<std::string>& dirs, const std::filesystem::path& base = ".");

struct ScalingConfig {
    int cores = 0;
    int nodes = 0;
    int mpi_procs = 0;
    int threads = 0;

    bool operator==(const ScalingConfig&) const = default;
};

/// Parses `cores,nodes,procs,threads`.
ScalingConfig parse_scaling_config(std::string_view text);

struct ScalingRun {
    ScalingConfig config;
    std::filesystem::path run_dir;
    /// Set by the user for configurations known to be unrepresentative
    /// (e.g. swapping); the tool cannot detect this itself.
    bool pathological = false;
};

/// Timer rows of a strong-scaling table, in display order.
inline constexpr std::array<std::string_view, 7> kScalingRows{"construct_matrix", "coicsr",      "distribute", "analysis",
                                                               "facto",            "gmres/solve", "ITER"};

struct ScalingRow {
    std::string keyword;
    std::vector<double> elapsed;
    std::vector<std::string> elapsed_text;
    /// elapsed[baseline] / elapsed[i]; exactly 1 at the baseline, NaN when
    /// elapsed[i] is 0.
    std::vector<double> speedup;
    /// speedup[i] * cores[baseline] / cores[i].
    std::vector<double> efficiency;
};

struct ScalingTable {
    std::vector<ScalingConfig> configs;
    std::vector<bool> pathological;
    std::size_t iteration = 1;
    /// Column the speedups are relative to.
    std::size_t baseline = 0;
    std::vector<ScalingRow> rows;

    const ScalingRow& row(std::string_view keyword) const;
};

/// Times of iteration `iteration` (1-based) of `log_file` in each run. An
/// iteration is the block of timer lines closed by its ITER line. With
/// `exclude_pathological`, the first non-pathological run is the baseline.
ScalingTable scaling_report(const std::vector<ScalingRun>& runs, const std::string& log_file, std::size_t iteration,
                            bool exclude_pathological = false);

std::string render_scaling_table(const ScalingTable& table);

/// Whitespace-separated table with a header row, one row per quantity.
std::string format_scaling_machine(const ScalingTable& table);

}  // namespace simregress
