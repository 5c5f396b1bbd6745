#pragma once

#include <vector>

namespace simregress {

/// A segment of the time axis: nstep_n[i] steps of duration tstep_n[i]
/// (Alfven times), in order.
struct Subsequence {
    std::vector<double> tstep_n;
    std::vector<long long> nstep_n;

    /// Throws InvalidConfig unless the vectors are nonempty, equally long,
    /// durations > 0 and counts >= 1.
    void validate() const;
    long long total_steps() const;
    double duration() const;

    bool operator==(const Subsequence&) const = default;
};

/// Back-to-back concatenation, as seen by a single continuous time axis.
Subsequence concatenate(const std::vector<Subsequence>& parts);

}  // namespace simregress
