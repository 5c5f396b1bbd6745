#include "simregress/subsequence.hpp"

#include <cmath>

#include "simregress/error.hpp"

namespace simregress {

void Subsequence::validate() const {
    if (tstep_n.empty() || tstep_n.size() != nstep_n.size()) {
        throw Error(ErrorCode::InvalidConfig, "tstep_n and nstep_n must be nonempty and of equal length");
    }
    for (double dt : tstep_n) {
        if (!(dt > 0.0) || !std::isfinite(dt)) {
            throw Error(ErrorCode::InvalidConfig, "time-step durations must be > 0");
        }
    }
    for (long long n : nstep_n) {
        if (n < 1) {
            throw Error(ErrorCode::InvalidConfig, "step counts must be >= 1");
        }
    }
}

long long Subsequence::total_steps() const {
    long long total = 0;
    for (long long n : nstep_n) {
        total += n;
    }
    return total;
}

double Subsequence::duration() const {
    double total = 0.0;
    for (std::size_t i = 0; i < tstep_n.size(); ++i) {
        total += tstep_n[i] * static_cast<double>(nstep_n[i]);
    }
    return total;
}

Subsequence concatenate(const std::vector<Subsequence>& parts) {
    Subsequence out;
    for (const auto& p : parts) {
        out.tstep_n.insert(out.tstep_n.end(), p.tstep_n.begin(), p.tstep_n.end());
        out.nstep_n.insert(out.nstep_n.end(), p.nstep_n.begin(), p.nstep_n.end());
    }
    return out;
}

}  // namespace simregress
