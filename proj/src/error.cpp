#include "ws4a/error.hpp"

namespace ws4a {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidArgument: return "invalid-argument";
        case ErrorKind::Parse: return "parse-error";
        case ErrorKind::Cycle: return "cycle-error";
        case ErrorKind::UnknownConcept: return "unknown-concept";
        case ErrorKind::SourceMismatch: return "source-mismatch";
        case ErrorKind::Transport: return "transport-error";
        case ErrorKind::ReplayMiss: return "replay-miss";
        case ErrorKind::BadAccession: return "bad-accession";
        case ErrorKind::CutoffViolation: return "cutoff-violation";
        case ErrorKind::BadWeights: return "bad-weights";
        case ErrorKind::DegenerateLabels: return "degenerate-labels";
        case ErrorKind::DimensionMismatch: return "dimension-mismatch";
        case ErrorKind::Io: return "io-error";
        case ErrorKind::FormatVersionMismatch: return "format-version-mismatch";
        case ErrorKind::MalformedUrl: return "malformed-url";
        case ErrorKind::SchemaMismatch: return "schema-mismatch";
        case ErrorKind::Config: return "config-error";
        case ErrorKind::CapViolation: return "cap-violation";
    }
    return "unknown";
}

}  // namespace ws4a
