#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "simregress/subsequence.hpp"
#include "simregress/timeseries.hpp"

namespace simregress {

/// SplitMix64: the noise source of the toy simulator, fixed so fixtures are
/// reproducible bit for bit in any language.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1) from the top 53 bits.
    double next_unit() { return static_cast<double>(next() >> 11) * 0x1p-53; }

    /// Uniform in [-1, 1).
    double next_symmetric() { return 2.0 * next_unit() - 1.0; }

private:
    std::uint64_t state_;
};

/// Stand-in for a simulation run: M Fourier modes growing exponentially
/// from a tiny seed energy, then saturating, with seeded multiplicative
/// noise playing the part of run-to-run nondeterminism.
struct ToyConfig {
    std::size_t modes = 2;
    std::vector<double> gamma{0.03, 0.07};  // amplitude growth rates
    std::vector<double> e0{1e-30, 1e-30};
    std::vector<double> e_sat{1.0, 1.0};
    double noise_amp = 1e-3;
    /// Noise is 10x stronger before this time.
    double noise_window_end = 50.0;
    std::uint64_t seed = 1;
    Subsequence steps{{5.0}, {200}};

    void validate() const;
};

inline constexpr double kStartupNoiseFactor = 10.0;

/// Kinetic energy of mode m is the magnetic model scaled by 1/(m+1).
double kinetic_factor(int mode);

/// Noiseless magnetic energy of one mode:
///   E(t) = e_sat e0 e^{2 gamma t} / (e_sat + e0 (e^{2 gamma t} - 1))
/// evaluated in log space so large gamma*t cannot overflow.
double logistic_energy(double t, double gamma, double e0, double e_sat);

/// Times start at 0 and advance through config.steps. Each energy is
/// multiplied by (1 + eta), eta uniform in [-a, a) with a = noise_amp (x10
/// before noise_window_end), drawn row by row: magnetic modes, then kinetic.
/// Growth rates are derived from the noisy energies.
MacroscopicSeries simulate(const ToyConfig& config);

/// Keys: modes, gamma, e0, e_sat, noise_amp, noise_window_end, seed, and
/// tstep_n/nstep_n either at top level or in [subsequence] blocks.
ToyConfig load_toy_config(const std::string& path);
ToyConfig parse_toy_config(const std::string& text);
std::string format_toy_config(const ToyConfig& config);

/// Synthetic log with fixed timings in the simulation code's timer format.
std::string toy_timer_log(const ToyConfig& config);

/// Writes macroscopic_vars.dat and out_loop1 into `dir`, creating it if needed.
void write_run(const ToyConfig& config, const std::filesystem::path& dir);

}  // namespace simregress
