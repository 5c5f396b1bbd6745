#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "simregress/metric_spec.hpp"
#include "simregress/timeseries.hpp"

namespace simregress {

/// 2|a - b| / (|a| + |b|), in [0, 2]. Equal arguments (including 0, 0) give 0;
/// a NaN argument gives NaN. Symmetric and invariant under common scaling.
double relative_difference(double a, double b);

enum class Verdict { ok, fail };

struct Violation {
    enum class Kind { exceeds_threshold, non_finite };

    double time;
    Quantity quantity;
    int mode;
    double s_a;
    double s_b;
    /// +inf for non_finite violations.
    double relative_difference;
    Kind kind = Kind::exceeds_threshold;
};

struct ComparisonReport {
    Verdict verdict = Verdict::ok;
    std::size_t compared_lines = 0;
    std::size_t total_lines = 0;
    /// Sorted by time, then quantity, then mode.
    std::vector<Violation> violations;
    double max_relative_difference = 0.0;
    /// Growth-rate columns per extract file (after the time column).
    std::size_t extract_columns = 0;
    std::pair<std::string, std::string> extract_paths{"f1", "f2"};
};

struct CompareOptions {
    /// Write A's and B's windows to these paths. Empty strings skip writing.
    std::string extract_a;
    std::string extract_b;
};

/// Compares run B against reference A on every aligned time of A inside
/// [t_start, t_end]. total_lines counts A's in-window times, compared_lines
/// those that also exist in B, so a run still in flight reports C < T.
/// OK iff every selected growth rate pair differs by strictly less than thr.
ComparisonReport compare(const MacroscopicSeries& series_a, const MacroscopicSeries& series_b, const MetricSpec& spec,
                         const CompareOptions& options = {});

/// Status line, up to 10 violation lines, then gnuplot commands for the
/// two extract files.
std::string render_report(const ComparisonReport& report);

}  // namespace simregress
