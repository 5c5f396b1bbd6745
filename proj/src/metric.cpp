#include "simregress/metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "simregress/error.hpp"
#include "simregress/text.hpp"

namespace simregress {

std::string_view to_string(Quantity q) {
    return q == Quantity::magnetic ? "magnetic" : "kinetic";
}

Quantity parse_quantity(std::string_view text) {
    if (text == "magnetic") {
        return Quantity::magnetic;
    }
    if (text == "kinetic") {
        return Quantity::kinetic;
    }
    throw Error(ErrorCode::InvalidSpec, "unknown quantity '" + std::string(text) + "'");
}

void MetricSpec::validate() const {
    if (!(t_start < t_end)) {
        throw Error(ErrorCode::InvalidSpec, "t_start must be < t_end");
    }
    if (!(thr > 0.0 && thr <= 2.0)) {
        throw Error(ErrorCode::InvalidSpec, "thr must lie in (0, 2]");
    }
    if (quantities.empty() || modes.empty()) {
        throw Error(ErrorCode::InvalidSpec, "no quantity or mode selected");
    }
    if (!(time_match_tol >= 0.0)) {
        throw Error(ErrorCode::InvalidSpec, "time_match_tol must be >= 0");
    }
}

double relative_difference(double a, double b) {
    if (a == b) {
        return 0.0;
    }
    if (std::isnan(a) || std::isnan(b)) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    if (std::isinf(a) || std::isinf(b)) {
        return 2.0;
    }
    // Keep 2|a-b| and |a|+|b| finite. A power-of-two scale is exact this far
    // from the subnormal range.
    if (std::max(std::fabs(a), std::fabs(b)) > 0x1p1000) {
        a *= 0x1p-8;
        b *= 0x1p-8;
    }
    return std::min(2.0, 2.0 * std::fabs(a - b) / (std::fabs(a) + std::fabs(b)));
}

namespace {

bool times_match(double t_a, double t_b, double tol) {
    return std::fabs(t_a - t_b) <= tol * std::max(1.0, std::fabs(t_a));
}

/// Index of the time in `times` matching t, if any.
std::optional<std::size_t> find_time(const std::vector<double>& times, double t, double tol) {
    auto it = std::lower_bound(times.begin(), times.end(), t);
    for (auto candidate : {it, it == times.begin() ? it : std::prev(it)}) {
        if (candidate != times.end() && times_match(t, *candidate, tol)) {
            return static_cast<std::size_t>(candidate - times.begin());
        }
    }
    return std::nullopt;
}

}  // namespace

ComparisonReport compare(const MacroscopicSeries& series_a, const MacroscopicSeries& series_b, const MetricSpec& spec,
                         const CompareOptions& options) {
    spec.validate();

    struct Column {
        Quantity quantity;
        int mode;
        std::size_t index_a;
        std::size_t index_b;
    };
    std::vector<Column> columns;
    for (Quantity q : spec.quantities) {
        for (int mode : spec.modes) {
            const auto ka = series_a.mode_index(mode);
            const auto kb = series_b.mode_index(mode);
            if (!ka || !kb) {
                throw Error(ErrorCode::SpecModeMissing,
                            "mode " + std::to_string(mode) + " missing from " + (!ka ? "series A" : "series B"));
            }
            columns.push_back({q, mode, *ka, *kb});
        }
    }

    ComparisonReport report;
    report.extract_columns = columns.size();
    for (std::size_t i = 0; i < series_a.times.size(); ++i) {
        const double t = series_a.times[i];
        if (t < spec.t_start || t > spec.t_end) {
            continue;
        }
        ++report.total_lines;
        const auto j = find_time(series_b.times, t, spec.time_match_tol);
        if (!j) {
            continue;
        }
        ++report.compared_lines;
        for (const auto& c : columns) {
            const double s_a = series_a.growth(c.quantity)[i][c.index_a];
            const double s_b = series_b.growth(c.quantity)[*j][c.index_b];
            if (!std::isfinite(s_a) || !std::isfinite(s_b)) {
                const double inf = std::numeric_limits<double>::infinity();
                report.violations.push_back({t, c.quantity, c.mode, s_a, s_b, inf, Violation::Kind::non_finite});
                report.max_relative_difference = inf;
                continue;
            }
            const double d = relative_difference(s_a, s_b);
            report.max_relative_difference = std::max(report.max_relative_difference, d);
            if (!(d < spec.thr)) {
                report.violations.push_back({t, c.quantity, c.mode, s_a, s_b, d});
            }
        }
    }
    if (report.compared_lines == 0) {
        throw Error(ErrorCode::EmptyWindow, "no aligned time in [" + format_short(spec.t_start) + ", " +
                                                format_short(spec.t_end) + "]");
    }
    std::stable_sort(report.violations.begin(), report.violations.end(), [](const Violation& x, const Violation& y) {
        if (x.time != y.time) {
            return x.time < y.time;
        }
        if (x.quantity != y.quantity) {
            return x.quantity < y.quantity;
        }
        return x.mode < y.mode;
    });
    report.verdict = report.violations.empty() ? Verdict::ok : Verdict::fail;

    if (!options.extract_a.empty()) {
        write_extract(extract_window(series_a, spec), options.extract_a);
        report.extract_paths.first = options.extract_a;
    }
    if (!options.extract_b.empty()) {
        write_extract(extract_window(series_b, spec), options.extract_b);
        report.extract_paths.second = options.extract_b;
    }
    return report;
}

std::string render_report(const ComparisonReport& report) {
    constexpr std::size_t kMaxListed = 10;
    std::string out = report.verdict == Verdict::ok ? "OK " : "FAIL";
    out += " (nb lines compared: " + std::to_string(report.compared_lines) + "/" +
           std::to_string(report.total_lines) + ")\n";

    const std::size_t listed = std::min(kMaxListed, report.violations.size());
    for (std::size_t i = 0; i < listed; ++i) {
        const auto& v = report.violations[i];
        out += "t=" + format_short(v.time) + " " + std::string(to_string(v.quantity)) +
               " mode=" + std::to_string(v.mode) + " sA=" + format_short(v.s_a) + " sB=" + format_short(v.s_b) +
               " reldiff=" +
               (v.kind == Violation::Kind::non_finite ? std::string("non-finite") : format_short(v.relative_difference)) +
               "\n";
    }
    if (report.violations.size() > listed) {
        out += "... " + std::to_string(report.violations.size() - listed) + " more violations\n";
    }

    const auto& [f1, f2] = report.extract_paths;
    out += "\n# gnuplot commands to look at growth rates that have been compared :\n";
    out += "    set key autotitle columnhead;\n";
    for (std::size_t c = 0; c < report.extract_columns; ++c) {
        const std::string col = std::to_string(c + 2);
        out += "    set auto; plot '" + f1 + "' u 1:" + col + " ls " + std::to_string(2 * c + 1) + ", '" + f2 +
               "' u 1:" + col + " ls " + std::to_string(2 * c + 4);
        out += c + 1 < report.extract_columns ? "; pause -1\n" : "\n";
    }
    return out;
}

}  // namespace simregress
