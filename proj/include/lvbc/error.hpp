#pragma once

#include <stdexcept>
#include <string>

namespace lvbc {

/// Failure categories surfaced by the library. The CLI maps config-type
/// failures to exit code 2 and numerical ones to exit code 3.
enum class ErrorKind {
    InvalidArgument,
    SingularParameters,
    Domain,
    RegimeViolation,
    Stability,
    NonConvergence,
    SearchFailure,
    Bracket,
    Indeterminate,
    Divergence,
    Incompatible,
    DomainTooSmall,
    UnreliableEstimate,
};

inline const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidArgument: return "invalid-argument";
        case ErrorKind::SingularParameters: return "singular-parameters";
        case ErrorKind::Domain: return "domain";
        case ErrorKind::RegimeViolation: return "regime-violation";
        case ErrorKind::Stability: return "stability";
        case ErrorKind::NonConvergence: return "non-convergence";
        case ErrorKind::SearchFailure: return "search-failure";
        case ErrorKind::Bracket: return "bracket";
        case ErrorKind::Indeterminate: return "indeterminate";
        case ErrorKind::Divergence: return "divergence";
        case ErrorKind::Incompatible: return "incompatible";
        case ErrorKind::DomainTooSmall: return "domain-too-small";
        case ErrorKind::UnreliableEstimate: return "unreliable-estimate";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

    /// True for errors caused by bad input rather than by the numerics.
    bool is_config_error() const noexcept {
        switch (kind_) {
            case ErrorKind::InvalidArgument:
            case ErrorKind::SingularParameters:
            case ErrorKind::Domain:
            case ErrorKind::RegimeViolation:
            case ErrorKind::Bracket:
            case ErrorKind::Incompatible:
                return true;
            default:
                return false;
        }
    }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

}  // namespace lvbc
