#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace spillover {

enum class Errc {
    OutOfRangeVertex,
    SelfLoop,
    LengthMismatch,
    NotABijection,
    ParseError,
    InvalidProbability,
    TooManyEdges,
    TooFewVertices,
    InvalidSpec,
    InvalidCount,
    TooLargeForEnumeration,
    DegenerateGraph,
    EmptyInput,
    ObservedStatisticUndefined,
    ExcessiveDegeneracy,
    IoError,
};

constexpr std::string_view to_string(Errc code) noexcept {
    switch (code) {
        case Errc::OutOfRangeVertex: return "OutOfRangeVertex";
        case Errc::SelfLoop: return "SelfLoop";
        case Errc::LengthMismatch: return "LengthMismatch";
        case Errc::NotABijection: return "NotABijection";
        case Errc::ParseError: return "ParseError";
        case Errc::InvalidProbability: return "InvalidProbability";
        case Errc::TooManyEdges: return "TooManyEdges";
        case Errc::TooFewVertices: return "TooFewVertices";
        case Errc::InvalidSpec: return "InvalidSpec";
        case Errc::InvalidCount: return "InvalidCount";
        case Errc::TooLargeForEnumeration: return "TooLargeForEnumeration";
        case Errc::DegenerateGraph: return "DegenerateGraph";
        case Errc::EmptyInput: return "EmptyInput";
        case Errc::ObservedStatisticUndefined: return "ObservedStatisticUndefined";
        case Errc::ExcessiveDegeneracy: return "ExcessiveDegeneracy";
        case Errc::IoError: return "IoError";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

/// Parse failure; `line()` is 1-based, 0 when the failure is not tied to a line.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error(Errc::ParseError, "line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace spillover
