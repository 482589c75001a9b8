#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace fuelclean {

enum class Errc {
    MissingFile,
    MalformedRow,
    NonMonotoneIndex,
    IoFailure,
    SchemaMismatch,
    InvalidConfig,
    PreconditionViolation,
    UnboundedGap,
    InsufficientData,
    NotFilled,
    TooShort,
    DegenerateBandwidth,
    SingularDegree,
    BadLevels,
    ShapeMismatch,
    EmptyDetails,
    EvenWindow,
    EmptyInput,
    IndexOutOfRange,
    DegenerateTruth,
    NonPositiveTruth,
    InfeasibleSchedule,
};

inline const char* to_string(Errc code) noexcept {
    switch (code) {
    case Errc::MissingFile: return "MissingFile";
    case Errc::MalformedRow: return "MalformedRow";
    case Errc::NonMonotoneIndex: return "NonMonotoneIndex";
    case Errc::IoFailure: return "IoFailure";
    case Errc::SchemaMismatch: return "SchemaMismatch";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::PreconditionViolation: return "PreconditionViolation";
    case Errc::UnboundedGap: return "UnboundedGap";
    case Errc::InsufficientData: return "InsufficientData";
    case Errc::NotFilled: return "NotFilled";
    case Errc::TooShort: return "TooShort";
    case Errc::DegenerateBandwidth: return "DegenerateBandwidth";
    case Errc::SingularDegree: return "SingularDegree";
    case Errc::BadLevels: return "BadLevels";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::EmptyDetails: return "EmptyDetails";
    case Errc::EvenWindow: return "EvenWindow";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::DegenerateTruth: return "DegenerateTruth";
    case Errc::NonPositiveTruth: return "NonPositiveTruth";
    case Errc::InfeasibleSchedule: return "InfeasibleSchedule";
    }
    return "Unknown";
}

/// Exception carrying a machine-checkable error code. `line()` is set for
/// errors tied to a row of an input file (1-based, header is line 1).
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what, std::optional<std::size_t> line = std::nullopt)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), line_(line) {}

    Errc code() const noexcept { return code_; }
    std::optional<std::size_t> line() const noexcept { return line_; }

private:
    Errc code_;
    std::optional<std::size_t> line_;
};

} // namespace fuelclean
