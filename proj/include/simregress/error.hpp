#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace simregress {

/// Every failure the library reports. One enumerator per named error condition
/// of the public operations, so callers and tests can branch on the kind
/// without parsing messages.
enum class ErrorCode {
    // timeseries
    MissingFile,
    MalformedRow,
    NonMonotonicTime,
    ColumnCountMismatch,
    NonpositiveEnergy,
    DegenerateStep,
    EmptyWindow,
    UnknownMode,
    TimeGridMismatch,
    IoFailure,
    // metric
    SpecModeMissing,
    InvalidSpec,
    // scenario / launch
    UnknownModel,
    InvalidScenarioFile,
    ScheduleIndexOutOfRange,
    CompileFailed,
    StepFailed,
    DirectoryExists,
    DirectoryLocked,
    // timers
    MissingLog,
    NoMatches,
    MalformedTimerLine,
    IncompleteRun,
    // benchstore
    DestinationExists,
    MissingMacroscopicFile,
    MissingReadme,
    MissingStoreRoot,
    InvalidLabel,
    // toysim
    InvalidConfig,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message, std::optional<std::size_t> line = std::nullopt);

    ErrorCode code() const noexcept { return code_; }
    /// 1-based line number in the offending file, when the error is tied to one.
    std::optional<std::size_t> line() const noexcept { return line_; }

private:
    ErrorCode code_;
    std::optional<std::size_t> line_;
};

}  // namespace simregress
