#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "simregress/metric_spec.hpp"

namespace simregress {

enum class GrowthProvenance { file, derived };

/// Rows indexed [time][mode].
using Table = std::vector<std::vector<double>>;

/// The per-timestep signature of a run: energies and growth rates of every
/// Fourier mode. An absent growth rate (first record of a derived series) is
/// stored as a quiet NaN.
struct MacroscopicSeries {
    std::vector<double> times;
    std::vector<int> modes;
    Table magnetic_energy;
    Table kinetic_energy;
    Table magnetic_growth;
    Table kinetic_growth;
    GrowthProvenance growth_provenance = GrowthProvenance::file;

    std::size_t mode_count() const { return modes.size(); }
    std::optional<std::size_t> mode_index(int label) const;

    const Table& energy(Quantity q) const { return q == Quantity::magnetic ? magnetic_energy : kinetic_energy; }
    Table& energy(Quantity q) { return q == Quantity::magnetic ? magnetic_energy : kinetic_energy; }
    const Table& growth(Quantity q) const { return q == Quantity::magnetic ? magnetic_growth : kinetic_growth; }
    Table& growth(Quantity q) { return q == Quantity::magnetic ? magnetic_growth : kinetic_growth; }

    bool operator==(const MacroscopicSeries&) const = default;
};

/// Throws on the first broken invariant: times strictly increasing, M entries
/// per row and quantity, energies >= 0 with zero only in the first record.
void validate(const MacroscopicSeries& series);

/// Where each quantity lives in a whitespace-separated macroscopic file.
/// Columns are 1-based. Unset start columns follow the canonical order
/// `time | M magnetic energies | M kinetic energies | M magnetic growth |
/// M kinetic growth`; a growth column of 0 means the file has none and the
/// rates are derived from the energies.
struct ColumnLayout {
    std::size_t time_col = 1;
    std::size_t n_modes = 0;  // 0: infer from the first data row
    std::optional<std::size_t> magnetic_energy_col;
    std::optional<std::size_t> kinetic_energy_col;
    std::optional<std::size_t> magnetic_growth_col;
    std::optional<std::size_t> kinetic_growth_col;
};

/// Reads `time_col=`, `n_modes=`, `magnetic_energy_col=`, `kinetic_energy_col=`,
/// `magnetic_growth_col=`, `kinetic_growth_col=` from a key=value file.
ColumnLayout load_column_layout(const std::string& path);

inline constexpr const char* kMacroscopicFileName = "macroscopic_vars.dat";

MacroscopicSeries parse_macroscopic(const std::string& path, const ColumnLayout& layout = {});
MacroscopicSeries parse_macroscopic_text(const std::string& text, const ColumnLayout& layout = {});

/// Canonical layout, 17 significant digits. parse_macroscopic_text of the
/// result gives back the same series.
std::string format_macroscopic(const MacroscopicSeries& series);
void write_macroscopic(const MacroscopicSeries& series, const std::string& path);

/// Growth rate of the mode amplitude from consecutive energies:
///   g(t_i) = (ln E(t_i) - ln E(t_{i-1})) / (2 (t_i - t_{i-1}))
/// The first record has no predecessor and gets NaN.
MacroscopicSeries derive_growth_rates(MacroscopicSeries series, Quantity quantity);

struct GrowthSample {
    double time;
    double growth;
};

struct GrowthRateWindow {
    Quantity quantity;
    int mode;
    std::vector<GrowthSample> samples;

    std::string column_name() const;
};

/// One window per (quantity, mode) of the spec, in spec order (quantities
/// outer, modes inner), holding every series time within [t_start, t_end].
std::vector<GrowthRateWindow> extract_window(const MacroscopicSeries& series, const MetricSpec& spec);

/// Extract (`f1`/`f2`) format: a header row of column names, then
/// `time g1 g2 ...` per row. All windows must share the same sample times.
void write_extract(const std::vector<GrowthRateWindow>& windows, const std::string& path);

struct ExtractFile {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

ExtractFile read_extract(const std::string& path);

}  // namespace simregress
