#include "simregress/timeseries.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "simregress/error.hpp"
#include "simregress/keyvalue.hpp"
#include "simregress/text.hpp"

namespace simregress {

namespace {

constexpr double kAbsent = std::numeric_limits<double>::quiet_NaN();
constexpr std::string_view kProvenanceTag = "growth_provenance:";

std::string describe_row(double t, int mode) {
    return "t=" + format_short(t) + " mode=" + std::to_string(mode);
}

struct ResolvedLayout {
    std::size_t time_col;
    std::size_t n_modes;
    std::size_t mag_energy;
    std::size_t kin_energy;
    std::size_t mag_growth;  // 0: absent
    std::size_t kin_growth;
    std::size_t required_cols;
};

ResolvedLayout resolve(const ColumnLayout& layout, std::size_t row_cols, std::size_t line_no) {
    const bool mag_growth_absent = layout.magnetic_growth_col && *layout.magnetic_growth_col == 0;
    const bool kin_growth_absent = layout.kinetic_growth_col && *layout.kinetic_growth_col == 0;
    const std::size_t blocks = 2 + (mag_growth_absent ? 0 : 1) + (kin_growth_absent ? 0 : 1);

    std::size_t m = layout.n_modes;
    if (m == 0) {
        if (row_cols < 1 + blocks || (row_cols - 1) % blocks != 0) {
            throw Error(ErrorCode::ColumnCountMismatch,
                        std::to_string(row_cols) + " columns cannot hold time plus " + std::to_string(blocks) +
                            " per-mode blocks",
                        line_no);
        }
        m = (row_cols - 1) / blocks;
    }

    ResolvedLayout r{};
    r.time_col = layout.time_col;
    r.n_modes = m;
    r.mag_energy = layout.magnetic_energy_col.value_or(2);
    r.kin_energy = layout.kinetic_energy_col.value_or(2 + m);
    r.mag_growth = layout.magnetic_growth_col.value_or(2 + 2 * m);
    r.kin_growth = layout.kinetic_growth_col.value_or(mag_growth_absent ? 2 + 2 * m : 2 + 3 * m);
    if (r.time_col == 0 || r.mag_energy == 0 || r.kin_energy == 0) {
        throw Error(ErrorCode::InvalidSpec, "column numbers are 1-based");
    }
    r.required_cols = r.time_col;
    for (std::size_t start : {r.mag_energy, r.kin_energy, r.mag_growth, r.kin_growth}) {
        if (start != 0) {
            r.required_cols = std::max(r.required_cols, start + m - 1);
        }
    }
    return r;
}

void check_row(const MacroscopicSeries& s, std::size_t i, std::optional<std::size_t> line_no) {
    const std::size_t m = s.mode_count();
    for (const Table* table : {&s.magnetic_energy, &s.kinetic_energy, &s.magnetic_growth, &s.kinetic_growth}) {
        if (table->size() <= i || (*table)[i].size() != m) {
            throw Error(ErrorCode::ColumnCountMismatch, "row does not hold one value per mode", line_no);
        }
    }
    if (!std::isfinite(s.times[i])) {
        throw Error(ErrorCode::MalformedRow, "non-finite time", line_no);
    }
    if (i > 0 && !(s.times[i] > s.times[i - 1])) {
        throw Error(ErrorCode::NonMonotonicTime,
                    "time " + format_short(s.times[i]) + " after " + format_short(s.times[i - 1]), line_no);
    }
    for (const Table* table : {&s.magnetic_energy, &s.kinetic_energy}) {
        for (std::size_t k = 0; k < m; ++k) {
            const double e = (*table)[i][k];
            if (!(e >= 0.0) || !std::isfinite(e)) {
                throw Error(ErrorCode::MalformedRow, "invalid energy at " + describe_row(s.times[i], s.modes[k]),
                            line_no);
            }
            if (e == 0.0 && i > 0) {
                throw Error(ErrorCode::MalformedRow,
                            "zero energy after the first record at " + describe_row(s.times[i], s.modes[k]), line_no);
            }
        }
    }
}

std::vector<int> default_modes(std::size_t m) {
    std::vector<int> modes(m);
    for (std::size_t k = 0; k < m; ++k) {
        modes[k] = static_cast<int>(k + 1);
    }
    return modes;
}

}  // namespace

std::optional<std::size_t> MacroscopicSeries::mode_index(int label) const {
    const auto it = std::find(modes.begin(), modes.end(), label);
    if (it == modes.end()) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(it - modes.begin());
}

void validate(const MacroscopicSeries& series) {
    for (std::size_t i = 0; i < series.times.size(); ++i) {
        check_row(series, i, std::nullopt);
    }
}

ColumnLayout load_column_layout(const std::string& path) {
    const auto doc = parse_key_value(read_text_file(path), ErrorCode::InvalidSpec);
    const auto& root = doc.root();
    auto column = [&](const char* key) -> std::optional<std::size_t> {
        const auto raw = root.find(key);
        if (!raw) {
            return std::nullopt;
        }
        const auto v = parse_integer(*raw);
        if (!v || *v < 0) {
            throw Error(ErrorCode::InvalidSpec, std::string("bad value for ") + key + ": " + *raw);
        }
        return static_cast<std::size_t>(*v);
    };
    ColumnLayout layout;
    layout.time_col = column("time_col").value_or(1);
    layout.n_modes = column("n_modes").value_or(0);
    layout.magnetic_energy_col = column("magnetic_energy_col");
    layout.kinetic_energy_col = column("kinetic_energy_col");
    layout.magnetic_growth_col = column("magnetic_growth_col");
    layout.kinetic_growth_col = column("kinetic_growth_col");
    return layout;
}

MacroscopicSeries parse_macroscopic(const std::string& path, const ColumnLayout& layout) {
    if (!std::filesystem::is_regular_file(path)) {
        throw Error(ErrorCode::MissingFile, path);
    }
    return parse_macroscopic_text(read_text_file(path), layout);
}

MacroscopicSeries parse_macroscopic_text(const std::string& text, const ColumnLayout& layout) {
    MacroscopicSeries series;
    std::optional<ResolvedLayout> cols;
    std::size_t row_cols = 0;

    std::istringstream in(text);
    std::string raw;
    std::size_t line_no = 0;
    std::vector<double> values;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string_view line = trim(raw);
        if (line.empty()) {
            continue;
        }
        if (line.front() == '#') {
            const auto body = trim(line.substr(1));
            if (starts_with(body, kProvenanceTag)) {
                const auto value = trim(body.substr(kProvenanceTag.size()));
                series.growth_provenance = value == "derived" ? GrowthProvenance::derived : GrowthProvenance::file;
            }
            continue;
        }
        const auto tokens = split_whitespace(line);
        if (!cols) {
            cols = resolve(layout, tokens.size(), line_no);
            row_cols = tokens.size();
            if (row_cols < cols->required_cols) {
                throw Error(ErrorCode::ColumnCountMismatch,
                            "layout needs " + std::to_string(cols->required_cols) + " columns, row has " +
                                std::to_string(row_cols),
                            line_no);
            }
            series.modes = default_modes(cols->n_modes);
        }
        if (tokens.size() != row_cols) {
            throw Error(ErrorCode::ColumnCountMismatch,
                        "expected " + std::to_string(row_cols) + " columns, found " + std::to_string(tokens.size()),
                        line_no);
        }
        values.clear();
        for (auto token : tokens) {
            const auto v = parse_real(token);
            if (!v) {
                throw Error(ErrorCode::MalformedRow, "not a number: '" + std::string(token) + "'", line_no);
            }
            values.push_back(*v);
        }

        const std::size_t m = cols->n_modes;
        auto block = [&](std::size_t start) {
            std::vector<double> row(m, kAbsent);
            if (start != 0) {
                for (std::size_t k = 0; k < m; ++k) {
                    row[k] = values[start - 1 + k];
                }
            }
            return row;
        };
        series.times.push_back(values[cols->time_col - 1]);
        series.magnetic_energy.push_back(block(cols->mag_energy));
        series.kinetic_energy.push_back(block(cols->kin_energy));
        series.magnetic_growth.push_back(block(cols->mag_growth));
        series.kinetic_growth.push_back(block(cols->kin_growth));
        check_row(series, series.times.size() - 1, line_no);
    }

    if (!cols && layout.n_modes > 0) {
        series.modes = default_modes(layout.n_modes);
    }
    if (cols && cols->mag_growth == 0) {
        series = derive_growth_rates(std::move(series), Quantity::magnetic);
    }
    if (cols && cols->kin_growth == 0) {
        series = derive_growth_rates(std::move(series), Quantity::kinetic);
    }
    return series;
}

std::string format_macroscopic(const MacroscopicSeries& series) {
    std::string out;
    out += "# growth_provenance: ";
    out += series.growth_provenance == GrowthProvenance::derived ? "derived" : "file";
    out += "\n# time";
    const char* prefixes[] = {"E_mag_", "E_kin_", "g_mag_", "g_kin_"};
    for (const char* prefix : prefixes) {
        for (int mode : series.modes) {
            out += ' ';
            out += prefix;
            out += std::to_string(mode);
        }
    }
    out += '\n';
    for (std::size_t i = 0; i < series.times.size(); ++i) {
        out += format_real(series.times[i]);
        for (const Table* table :
             {&series.magnetic_energy, &series.kinetic_energy, &series.magnetic_growth, &series.kinetic_growth}) {
            for (double v : (*table)[i]) {
                out += ' ';
                out += format_real(v);
            }
        }
        out += '\n';
    }
    return out;
}

void write_macroscopic(const MacroscopicSeries& series, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorCode::IoFailure, "cannot write " + path);
    }
    out << format_macroscopic(series);
    if (!out) {
        throw Error(ErrorCode::IoFailure, "short write to " + path);
    }
}

MacroscopicSeries derive_growth_rates(MacroscopicSeries series, Quantity quantity) {
    const Table& energy = series.energy(quantity);
    Table growth(series.times.size(), std::vector<double>(series.mode_count(), kAbsent));
    for (std::size_t i = 1; i < series.times.size(); ++i) {
        const double dt = series.times[i] - series.times[i - 1];
        if (dt == 0.0) {
            throw Error(ErrorCode::DegenerateStep, "repeated time " + format_short(series.times[i]));
        }
        for (std::size_t k = 0; k < series.mode_count(); ++k) {
            const double e = energy[i][k];
            const double e_prev = energy[i - 1][k];
            if (!(e > 0.0)) {
                throw Error(ErrorCode::NonpositiveEnergy, describe_row(series.times[i], series.modes[k]));
            }
            if (!(e_prev > 0.0)) {
                if (i - 1 == 0 && e_prev == 0.0) {
                    continue;  // zero seed: no finite rate into t_1
                }
                throw Error(ErrorCode::NonpositiveEnergy, describe_row(series.times[i - 1], series.modes[k]));
            }
            growth[i][k] = (std::log(e) - std::log(e_prev)) / (2.0 * dt);
        }
    }
    series.growth(quantity) = std::move(growth);
    series.growth_provenance = GrowthProvenance::derived;
    return series;
}

std::string GrowthRateWindow::column_name() const {
    return std::string(to_string(quantity)) + "_growth_m" + std::to_string(mode);
}

std::vector<GrowthRateWindow> extract_window(const MacroscopicSeries& series, const MetricSpec& spec) {
    if (!(spec.t_start < spec.t_end)) {
        throw Error(ErrorCode::InvalidSpec, "window start must precede its end");
    }
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < series.times.size(); ++i) {
        if (series.times[i] >= spec.t_start && series.times[i] <= spec.t_end) {
            rows.push_back(i);
        }
    }
    std::vector<GrowthRateWindow> windows;
    for (Quantity q : spec.quantities) {
        for (int mode : spec.modes) {
            const auto k = series.mode_index(mode);
            if (!k) {
                throw Error(ErrorCode::UnknownMode, "mode " + std::to_string(mode));
            }
            if (rows.empty()) {
                throw Error(ErrorCode::EmptyWindow,
                            "no sample in [" + format_short(spec.t_start) + ", " + format_short(spec.t_end) + "]");
            }
            GrowthRateWindow w{q, mode, {}};
            w.samples.reserve(rows.size());
            for (std::size_t i : rows) {
                w.samples.push_back({series.times[i], series.growth(q)[i][*k]});
            }
            windows.push_back(std::move(w));
        }
    }
    return windows;
}

void write_extract(const std::vector<GrowthRateWindow>& windows, const std::string& path) {
    if (windows.empty()) {
        throw Error(ErrorCode::TimeGridMismatch, "no windows to align");
    }
    const auto& grid = windows.front().samples;
    for (const auto& w : windows) {
        const bool same = w.samples.size() == grid.size() &&
                          std::equal(w.samples.begin(), w.samples.end(), grid.begin(),
                                     [](const GrowthSample& a, const GrowthSample& b) { return a.time == b.time; });
        if (!same) {
            throw Error(ErrorCode::TimeGridMismatch, w.column_name() + " has a different time grid");
        }
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorCode::IoFailure, "cannot write " + path);
    }
    out << "time";
    for (const auto& w : windows) {
        out << ' ' << w.column_name();
    }
    out << '\n';
    for (std::size_t i = 0; i < grid.size(); ++i) {
        out << format_real(grid[i].time);
        for (const auto& w : windows) {
            out << ' ' << format_real(w.samples[i].growth);
        }
        out << '\n';
    }
    if (!out) {
        throw Error(ErrorCode::IoFailure, "short write to " + path);
    }
}

ExtractFile read_extract(const std::string& path) {
    std::istringstream in(read_text_file(path));
    ExtractFile file;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto tokens = split_whitespace(raw);
        if (tokens.empty()) {
            continue;
        }
        if (file.header.empty()) {
            file.header.assign(tokens.begin(), tokens.end());
            continue;
        }
        if (tokens.size() != file.header.size()) {
            throw Error(ErrorCode::ColumnCountMismatch, "row width differs from header", line_no);
        }
        std::vector<double> row;
        for (auto token : tokens) {
            const auto v = parse_real(token);
            if (!v) {
                throw Error(ErrorCode::MalformedRow, "not a number: '" + std::string(token) + "'", line_no);
            }
            row.push_back(*v);
        }
        file.rows.push_back(std::move(row));
    }
    return file;
}

}  // namespace simregress
