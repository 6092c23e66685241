#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ws4a {

enum class ErrorKind {
    InvalidArgument,
    Parse,
    Cycle,
    UnknownConcept,
    SourceMismatch,
    Transport,
    ReplayMiss,
    BadAccession,
    CutoffViolation,
    BadWeights,
    DegenerateLabels,
    DimensionMismatch,
    Io,
    FormatVersionMismatch,
    MalformedUrl,
    SchemaMismatch,
    Config,
    CapViolation,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries a kind so callers (and the
/// CLI exit code) can distinguish error classes without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

}  // namespace ws4a
