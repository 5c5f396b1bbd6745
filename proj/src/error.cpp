#include "simregress/error.hpp"

namespace simregress {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::MissingFile: return "MissingFile";
        case ErrorCode::MalformedRow: return "MalformedRow";
        case ErrorCode::NonMonotonicTime: return "NonMonotonicTime";
        case ErrorCode::ColumnCountMismatch: return "ColumnCountMismatch";
        case ErrorCode::NonpositiveEnergy: return "NonpositiveEnergy";
        case ErrorCode::DegenerateStep: return "DegenerateStep";
        case ErrorCode::EmptyWindow: return "EmptyWindow";
        case ErrorCode::UnknownMode: return "UnknownMode";
        case ErrorCode::TimeGridMismatch: return "TimeGridMismatch";
        case ErrorCode::IoFailure: return "IoFailure";
        case ErrorCode::SpecModeMissing: return "SpecModeMissing";
        case ErrorCode::InvalidSpec: return "InvalidSpec";
        case ErrorCode::UnknownModel: return "UnknownModel";
        case ErrorCode::InvalidScenarioFile: return "InvalidScenarioFile";
        case ErrorCode::ScheduleIndexOutOfRange: return "ScheduleIndexOutOfRange";
        case ErrorCode::CompileFailed: return "CompileFailed";
        case ErrorCode::StepFailed: return "StepFailed";
        case ErrorCode::DirectoryExists: return "DirectoryExists";
        case ErrorCode::DirectoryLocked: return "DirectoryLocked";
        case ErrorCode::MissingLog: return "MissingLog";
        case ErrorCode::NoMatches: return "NoMatches";
        case ErrorCode::MalformedTimerLine: return "MalformedTimerLine";
        case ErrorCode::IncompleteRun: return "IncompleteRun";
        case ErrorCode::DestinationExists: return "DestinationExists";
        case ErrorCode::MissingMacroscopicFile: return "MissingMacroscopicFile";
        case ErrorCode::MissingReadme: return "MissingReadme";
        case ErrorCode::MissingStoreRoot: return "MissingStoreRoot";
        case ErrorCode::InvalidLabel: return "InvalidLabel";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
    }
    return "Unknown";
}

namespace {

std::string compose(ErrorCode code, const std::string& message, std::optional<std::size_t> line) {
    std::string out(to_string(code));
    if (line) {
        out += "(" + std::to_string(*line) + ")";
    }
    if (!message.empty()) {
        out += ": " + message;
    }
    return out;
}

}  // namespace

Error::Error(ErrorCode code, const std::string& message, std::optional<std::size_t> line)
    : std::runtime_error(compose(code, message, line)), code_(code), line_(line) {}

}  // namespace simregress
