#include "simregress/timers.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "simregress/benchstore.hpp"
#include "simregress/error.hpp"
#include "simregress/text.hpp"

namespace fs = std::filesystem;

namespace simregress {

namespace {

// Rank, padding and marker together span 3 + 23 columns before " :".
constexpr std::size_t kNameColumnEnd = 23;

std::string fixed(double value, int width, int decimals) {
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%*.*f", width, decimals, value);
    return buffer;
}

std::vector<std::string> read_lines(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        lines.push_back(std::move(line));
    }
    return lines;
}

std::string readme_comment(const fs::path& dir) {
    if (!fs::is_regular_file(dir / kReadmeName)) {
        return "-";
    }
    return load_machine_metadata(dir).comment;
}

/// All rank-0 timer records of a log, in file order.
std::vector<TimerRecord> all_timers(const fs::path& run_dir, const std::string& log_file) {
    const auto path = run_dir / log_file;
    if (!fs::is_regular_file(path)) {
        throw Error(ErrorCode::MissingLog, path.string());
    }
    const auto lines = read_lines(path);
    std::vector<TimerRecord> out;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].find(kElapsedMarker) == std::string::npos) {
            continue;
        }
        auto record = parse_timer_line(lines[i]);
        if (!record) {
            throw Error(ErrorCode::MalformedTimerLine, path.string(), i + 1);
        }
        if (record->rank != 0) {
            continue;
        }
        record->log_file = log_file;
        record->run_dir = run_dir;
        record->line_no = i + 1;
        out.push_back(std::move(*record));
    }
    return out;
}

std::string cell(const std::string& text, std::size_t width) {
    return text.size() >= width ? " " + text : std::string(width - text.size(), ' ') + text;
}

std::string ratio_text(double v) {
    return std::isfinite(v) ? fixed(v, 0, 2) : "-";
}

}  // namespace

TimerKeyword::TimerKeyword(std::string name) : name_(std::move(name)) {
    const bool blank = std::any_of(name_.begin(), name_.end(), [](unsigned char c) { return std::isspace(c); });
    if (name_.empty() || blank) {
        throw Error(ErrorCode::InvalidSpec, "timer keyword must be nonempty and contain no whitespace");
    }
}

std::optional<TimerRecord> parse_timer_line(std::string_view line) {
    const auto marker = line.find(kElapsedMarker);
    const auto hash = line.find('#');
    if (marker == std::string_view::npos || hash == std::string_view::npos || hash > marker) {
        return std::nullopt;
    }
    const auto rank = parse_integer(trim(line.substr(0, hash)));
    if (!rank) {
        return std::nullopt;
    }
    auto rest = line.substr(marker + kElapsedMarker.size());
    if (!rest.empty() && rest.front() == ',') {
        rest.remove_prefix(1);
    }
    const auto colon = rest.rfind(':');
    if (colon == std::string_view::npos) {
        return std::nullopt;
    }
    const auto name = trim(rest.substr(0, colon));
    const auto seconds = trim(rest.substr(colon + 1));
    const auto value = parse_real(seconds);
    if (name.empty() || !value || !(*value >= 0.0) || !std::isfinite(*value)) {
        return std::nullopt;
    }
    TimerRecord record;
    record.keyword = std::string(name);
    record.rank = static_cast<int>(*rank);
    record.elapsed_text = std::string(seconds);
    record.elapsed = *value;
    record.line = std::string(line);
    return record;
}

std::string format_timer_line(std::string_view name, double seconds, TimerLineStyle style, int rank) {
    const std::string_view marker = style == TimerLineStyle::comma ? "## Elapsed time, " : "# Elapsed time ";
    const std::size_t extra = style == TimerLineStyle::comma ? 2 : 0;
    const std::size_t used = name.size() + extra;
    const std::size_t pad = used < kNameColumnEnd ? kNameColumnEnd - used : 1;
    char rank_field[16];
    std::snprintf(rank_field, sizeof rank_field, "%3d", rank);
    return std::string(rank_field) + std::string(pad, ' ') + std::string(marker) + std::string(name) + " :" +
           fixed(seconds, 20, 7);
}

std::vector<TimerRecord> scan_log(const fs::path& run_dir, const std::string& log_file, const TimerKeyword& keyword,
                                  const ScanOptions& options) {
    const auto path = run_dir / log_file;
    if (!fs::is_regular_file(path)) {
        throw Error(ErrorCode::MissingLog, path.string());
    }
    const auto lines = read_lines(path);
    std::vector<TimerRecord> out;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto& line = lines[i];
        if (line.find(kElapsedMarker) == std::string::npos || line.find(keyword.name()) == std::string::npos) {
            continue;
        }
        auto record = parse_timer_line(line);
        if (!record) {
            throw Error(ErrorCode::MalformedTimerLine, path.string(), i + 1);
        }
        if (options.rank && record->rank != *options.rank) {
            continue;
        }
        record->log_file = log_file;
        record->run_dir = run_dir;
        record->line_no = i + 1;
        out.push_back(std::move(*record));
    }
    if (options.limit && *options.limit == 0) {
        return {};
    }
    if (out.empty()) {
        throw Error(ErrorCode::NoMatches, "'" + keyword.name() + "' in " + path.string());
    }
    if (options.limit && out.size() > *options.limit) {
        out.resize(*options.limit);
    }
    return out;
}

std::string timing_bench(const TimerKeyword& keyword, const std::string& log_file, std::optional<std::size_t> limit,
                         const std::vector<std::string>& dirs, const fs::path& base) {
    std::string out;
    for (const auto& dir : dirs) {
        const fs::path run_dir = base / dir;
        out += "== " + dir + " ( " + readme_comment(run_dir) + " )\n";
        try {
            ScanOptions options;
            options.limit = limit;
            for (const auto& record : scan_log(run_dir, log_file, keyword, options)) {
                out += record.line + "\n";
            }
        } catch (const Error& e) {
            switch (e.code()) {
                case ErrorCode::MissingLog: out += "missing log file " + log_file + "\n"; break;
                case ErrorCode::NoMatches: out += "no matches\n"; break;
                default: out += std::string("error: ") + e.what() + "\n"; break;
            }
        }
    }
    return out;
}

ScalingConfig parse_scaling_config(std::string_view text) {
    std::array<int, 4> values{};
    std::size_t n = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = std::min(text.find(',', start), text.size());
        const auto v = parse_integer(trim(text.substr(start, comma - start)));
        if (n == values.size() || !v || *v < 1) {
            throw Error(ErrorCode::InvalidSpec, "expected cores,nodes,procs,threads, got '" + std::string(text) + "'");
        }
        values[n++] = static_cast<int>(*v);
        start = comma + 1;
    }
    if (n != values.size()) {
        throw Error(ErrorCode::InvalidSpec, "expected cores,nodes,procs,threads, got '" + std::string(text) + "'");
    }
    return {values[0], values[1], values[2], values[3]};
}

const ScalingRow& ScalingTable::row(std::string_view keyword) const {
    for (const auto& r : rows) {
        if (r.keyword == keyword) {
            return r;
        }
    }
    throw Error(ErrorCode::InvalidSpec, "no scaling row '" + std::string(keyword) + "'");
}

ScalingTable scaling_report(const std::vector<ScalingRun>& runs, const std::string& log_file, std::size_t iteration,
                            bool exclude_pathological) {
    if (runs.size() < 2) {
        throw Error(ErrorCode::InvalidSpec, "a scaling report needs at least two runs");
    }
    if (iteration < 1) {
        throw Error(ErrorCode::InvalidSpec, "iterations are numbered from 1");
    }

    ScalingTable table;
    table.iteration = iteration;
    for (const auto& run : runs) {
        table.configs.push_back(run.config);
        table.pathological.push_back(run.pathological);
    }
    if (exclude_pathological) {
        const auto it = std::find(table.pathological.begin(), table.pathological.end(), false);
        if (it == table.pathological.end()) {
            throw Error(ErrorCode::InvalidSpec, "every configuration is marked pathological");
        }
        table.baseline = static_cast<std::size_t>(it - table.pathological.begin());
    }
    for (auto keyword : kScalingRows) {
        table.rows.push_back(ScalingRow{std::string(keyword), {}, {}, {}, {}});
    }

    for (const auto& run : runs) {
        const auto timers = all_timers(run.run_dir, log_file);
        // Iteration k spans the records after the (k-1)-th ITER line up to
        // and including the k-th.
        std::size_t seen = 0;
        std::size_t begin = 0;
        std::optional<std::size_t> end;
        for (std::size_t i = 0; i < timers.size(); ++i) {
            if (timers[i].keyword.find("ITER") == std::string::npos) {
                continue;
            }
            ++seen;
            if (seen == iteration - 1) {
                begin = i + 1;
            }
            if (seen == iteration) {
                end = i + 1;
                break;
            }
        }
        if (!end) {
            throw Error(ErrorCode::IncompleteRun, run.run_dir.string() + ": iteration " + std::to_string(iteration) +
                                                      " has no ITER timer");
        }
        for (auto& row : table.rows) {
            const auto first = timers.begin() + static_cast<std::ptrdiff_t>(begin);
            const auto last = timers.begin() + static_cast<std::ptrdiff_t>(*end);
            const auto hit = std::find_if(first, last, [&](const TimerRecord& r) {
                return r.keyword.find(row.keyword) != std::string::npos;
            });
            if (hit == last) {
                throw Error(ErrorCode::IncompleteRun, run.run_dir.string() + ": no " + row.keyword +
                                                          " timer in iteration " + std::to_string(iteration));
            }
            row.elapsed.push_back(hit->elapsed);
            row.elapsed_text.push_back(hit->elapsed_text);
        }
    }

    const std::size_t b = table.baseline;
    for (auto& row : table.rows) {
        for (std::size_t i = 0; i < runs.size(); ++i) {
            double speedup = std::numeric_limits<double>::quiet_NaN();
            if (i == b) {
                speedup = 1.0;
            } else if (row.elapsed[i] > 0.0) {
                speedup = row.elapsed[b] / row.elapsed[i];
            }
            row.speedup.push_back(speedup);
            row.efficiency.push_back(speedup * table.configs[b].cores / table.configs[i].cores);
        }
    }
    return table;
}

std::string render_scaling_table(const ScalingTable& table) {
    constexpr std::size_t label_width = 18;
    constexpr std::size_t width = 12;
    auto label = [&](const std::string& text) {
        std::string l = text;
        l.resize(std::max(label_width, l.size()), ' ');
        return l;
    };
    std::string out = "Timing in seconds for iteration " + std::to_string(table.iteration) + "\n";
    auto config_row = [&](const std::string& name, auto member) {
        out += label(name);
        for (const auto& c : table.configs) {
            out += cell(std::to_string(c.*member), width);
        }
        out += "\n";
    };
    config_row("Nb cores", &ScalingConfig::cores);
    config_row("Nb nodes", &ScalingConfig::nodes);
    config_row("Nb MPI proc.", &ScalingConfig::mpi_procs);
    config_row("Nb threads", &ScalingConfig::threads);
    out += label("pathological");
    for (bool p : table.pathological) {
        out += cell(p ? "yes" : "no", width);
    }
    out += "\n";
    for (const auto& row : table.rows) {
        out += label(row.keyword);
        for (const auto& t : row.elapsed_text) {
            out += cell(t, width);
        }
        out += "\n";
    }
    out += "Speedup / efficiency relative to " + std::to_string(table.configs[table.baseline].cores) + " cores\n";
    for (const auto& row : table.rows) {
        out += label(row.keyword);
        for (std::size_t i = 0; i < row.speedup.size(); ++i) {
            out += cell(ratio_text(row.speedup[i]) + "/" + ratio_text(row.efficiency[i]), width);
        }
        out += "\n";
    }
    return out;
}

std::string format_scaling_machine(const ScalingTable& table) {
    std::string out = "quantity";
    for (std::size_t i = 0; i < table.configs.size(); ++i) {
        out += " c" + std::to_string(i + 1);
    }
    out += "\n";
    auto int_row = [&](const std::string& name, auto value_of) {
        out += name;
        for (std::size_t i = 0; i < table.configs.size(); ++i) {
            out += " " + std::to_string(value_of(i));
        }
        out += "\n";
    };
    int_row("cores", [&](std::size_t i) { return table.configs[i].cores; });
    int_row("nodes", [&](std::size_t i) { return table.configs[i].nodes; });
    int_row("mpi_procs", [&](std::size_t i) { return table.configs[i].mpi_procs; });
    int_row("threads", [&](std::size_t i) { return table.configs[i].threads; });
    int_row("pathological", [&](std::size_t i) { return table.pathological[i] ? 1 : 0; });
    int_row("baseline", [&](std::size_t i) { return i == table.baseline ? 1 : 0; });
    for (const auto& row : table.rows) {
        out += "elapsed:" + row.keyword;
        for (const auto& t : row.elapsed_text) {
            out += " " + t;
        }
        out += "\nspeedup:" + row.keyword;
        for (double s : row.speedup) {
            out += " " + format_short(s);
        }
        out += "\nefficiency:" + row.keyword;
        for (double e : row.efficiency) {
            out += " " + format_short(e);
        }
        out += "\n";
    }
    return out;
}

}  // namespace simregress
