#include "simregress/toysim.hpp"

#include <cmath>
#include <fstream>

#include "simregress/error.hpp"
#include "simregress/keyvalue.hpp"
#include "simregress/text.hpp"
#include "simregress/timers.hpp"

namespace fs = std::filesystem;

namespace simregress {

namespace {

[[noreturn]] void invalid(const std::string& reason) {
    throw Error(ErrorCode::InvalidConfig, reason);
}

std::vector<double> reals(const std::string& key, const std::string& raw) {
    std::vector<double> out;
    for (auto token : split_whitespace(raw)) {
        const auto v = parse_real(token);
        if (!v) {
            invalid(key + ": not a number: '" + std::string(token) + "'");
        }
        out.push_back(*v);
    }
    return out;
}

long long integer(const std::string& key, const std::string& raw) {
    const auto v = parse_integer(raw);
    if (!v) {
        invalid(key + ": not an integer: '" + raw + "'");
    }
    return *v;
}

std::string join(const std::vector<double>& values) {
    std::string out;
    for (double v : values) {
        out += (out.empty() ? "" : " ") + format_short(v);
    }
    return out;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
    if (!out) {
        throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
    }
}

double log_add_exp(double a, double b) {
    const double hi = std::max(a, b);
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

}  // namespace

void ToyConfig::validate() const {
    if (modes < 1) {
        invalid("modes must be >= 1");
    }
    if (gamma.size() != modes || e0.size() != modes || e_sat.size() != modes) {
        invalid("gamma, e0 and e_sat need one value per mode");
    }
    for (std::size_t m = 0; m < modes; ++m) {
        if (!(gamma[m] > 0.0) || !std::isfinite(gamma[m])) {
            invalid("gamma must be > 0");
        }
        if (!(e0[m] > 0.0) || !(e_sat[m] > e0[m]) || !std::isfinite(e_sat[m])) {
            invalid("need 0 < e0 < e_sat for every mode");
        }
    }
    if (!(noise_amp >= 0.0) || !(noise_amp < 1.0)) {
        invalid("noise_amp must lie in [0, 1)");
    }
    if (noise_window_end > 0.0 && !(kStartupNoiseFactor * noise_amp < 1.0)) {
        invalid("startup noise 10*noise_amp must stay below 1 to keep energies positive");
    }
    try {
        steps.validate();
    } catch (const Error& e) {
        invalid(e.what());
    }
}

double kinetic_factor(int mode) {
    return 1.0 / (mode + 1.0);
}

double logistic_energy(double t, double gamma, double e0, double e_sat) {
    const double x = 2.0 * gamma * t;
    const double log_e = std::log(e_sat) + std::log(e0) + x - log_add_exp(std::log(e_sat - e0), std::log(e0) + x);
    return std::exp(log_e);
}

MacroscopicSeries simulate(const ToyConfig& config) {
    config.validate();

    std::vector<double> times{0.0};
    double t = 0.0;
    for (std::size_t j = 0; j < config.steps.tstep_n.size(); ++j) {
        for (long long n = 0; n < config.steps.nstep_n[j]; ++n) {
            t += config.steps.tstep_n[j];
            times.push_back(t);
        }
    }

    MacroscopicSeries series;
    series.times = times;
    for (std::size_t m = 0; m < config.modes; ++m) {
        series.modes.push_back(static_cast<int>(m + 1));
    }
    SplitMix64 rng(config.seed);
    for (double time : times) {
        const double amp = time < config.noise_window_end ? kStartupNoiseFactor * config.noise_amp : config.noise_amp;
        std::vector<double> clean(config.modes);
        for (std::size_t m = 0; m < config.modes; ++m) {
            clean[m] = logistic_energy(time, config.gamma[m], config.e0[m], config.e_sat[m]);
        }
        std::vector<double> mag(config.modes);
        std::vector<double> kin(config.modes);
        for (std::size_t m = 0; m < config.modes; ++m) {
            mag[m] = clean[m] * (1.0 + amp * rng.next_symmetric());
        }
        for (std::size_t m = 0; m < config.modes; ++m) {
            kin[m] = kinetic_factor(series.modes[m]) * clean[m] * (1.0 + amp * rng.next_symmetric());
        }
        series.magnetic_energy.push_back(std::move(mag));
        series.kinetic_energy.push_back(std::move(kin));
    }
    series = derive_growth_rates(std::move(series), Quantity::magnetic);
    series = derive_growth_rates(std::move(series), Quantity::kinetic);
    return series;
}

ToyConfig parse_toy_config(const std::string& text) {
    const auto doc = parse_key_value(text, ErrorCode::InvalidConfig);
    const auto& root = doc.root();
    ToyConfig config;
    if (const auto v = root.find("modes")) {
        const long long m = integer("modes", *v);
        if (m < 1) {
            invalid("modes must be >= 1");
        }
        config.modes = static_cast<std::size_t>(m);
    }
    if (const auto v = root.find("gamma")) {
        config.gamma = reals("gamma", *v);
    }
    if (const auto v = root.find("e0")) {
        config.e0 = reals("e0", *v);
    }
    if (const auto v = root.find("e_sat")) {
        config.e_sat = reals("e_sat", *v);
    }
    // A single value applies to every mode.
    for (auto* field : {&config.gamma, &config.e0, &config.e_sat}) {
        if (field->size() == 1 && config.modes > 1) {
            field->assign(config.modes, field->front());
        }
    }
    if (const auto v = root.find("noise_amp")) {
        config.noise_amp = reals("noise_amp", *v).at(0);
    }
    if (const auto v = root.find("noise_window_end")) {
        config.noise_window_end = reals("noise_window_end", *v).at(0);
    }
    if (const auto v = root.find("seed")) {
        config.seed = static_cast<std::uint64_t>(integer("seed", *v));
    }

    std::vector<const KeyValueSection*> blocks = doc.all("subsequence");
    if (root.find("tstep_n") || root.find("nstep_n")) {
        blocks.insert(blocks.begin(), &root);
    }
    if (!blocks.empty()) {
        config.steps = {};
        for (const auto* block : blocks) {
            const auto tsteps = block->find("tstep_n");
            const auto nsteps = block->find("nstep_n");
            if (!tsteps || !nsteps) {
                invalid("tstep_n and nstep_n must be given together");
            }
            for (double dt : reals("tstep_n", *tsteps)) {
                config.steps.tstep_n.push_back(dt);
            }
            for (auto n : split_whitespace(*nsteps)) {
                config.steps.nstep_n.push_back(integer("nstep_n", std::string(n)));
            }
        }
    }
    config.validate();
    return config;
}

ToyConfig load_toy_config(const std::string& path) {
    return parse_toy_config(read_text_file(path));
}

std::string format_toy_config(const ToyConfig& config) {
    std::string out;
    out += "modes = " + std::to_string(config.modes) + "\n";
    out += "gamma = " + join(config.gamma) + "\n";
    out += "e0 = " + join(config.e0) + "\n";
    out += "e_sat = " + join(config.e_sat) + "\n";
    out += "noise_amp = " + format_short(config.noise_amp) + "\n";
    out += "noise_window_end = " + format_short(config.noise_window_end) + "\n";
    out += "seed = " + std::to_string(config.seed) + "\n";
    out += "tstep_n = " + join(config.steps.tstep_n) + "\n";
    out += "nstep_n =";
    for (long long n : config.steps.nstep_n) {
        out += " " + std::to_string(n);
    }
    out += "\n";
    return out;
}

std::string toy_timer_log(const ToyConfig& config) {
    struct Phase {
        std::string_view name;
        TimerLineStyle style;
        double first;  // iteration 1 (with analysis and factorisation)
        double later;
    };
    static constexpr Phase phases[] = {
        {"construct_matrix", TimerLineStyle::plain, 2.5, 2.5},
        {"distribute", TimerLineStyle::plain, 0.5, 0.001},
        {"coicsr", TimerLineStyle::plain, 0.25, 0.0},
        {"analysis", TimerLineStyle::plain, 1.5, 0.0},
        {"facto", TimerLineStyle::comma, 12.0, 0.0},
        {"first_solve", TimerLineStyle::plain, 13.75, 0.5},
        {"gmres/solve", TimerLineStyle::plain, 1.25, 1.25},
    };
    constexpr double overhead = 0.125;
    constexpr int iterations = 5;

    std::string out = " toy simulator: " + std::to_string(config.modes) + " modes, seed " +
                      std::to_string(config.seed) + "\n";
    for (int it = 1; it <= iterations; ++it) {
        out += " time step " + std::to_string(it) + "\n";
        double total = overhead;
        for (const auto& p : phases) {
            const double seconds = it == 1 ? p.first : p.later;
            // first_solve already includes analysis and factorisation.
            if (p.name != "analysis" && p.name != "facto" && p.name != "coicsr") {
                total += seconds;
            }
            out += format_timer_line(p.name, seconds, p.style) + "\n";
        }
        out += format_timer_line("ITERATION", total) + "\n";
    }
    return out;
}

void write_run(const ToyConfig& config, const fs::path& dir) {
    const auto series = simulate(config);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw Error(ErrorCode::IoFailure, "cannot create " + dir.string());
    }
    write_macroscopic(series, (dir / kMacroscopicFileName).string());
    write_file(dir / "out_loop1", toy_timer_log(config));
}

}  // namespace simregress
