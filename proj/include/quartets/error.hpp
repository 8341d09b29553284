#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace quartets {

enum class ErrorKind {
    Parse,
    Cycle,
    TimeOrder,
    DuplicateName,
    UnknownNode,
    InvalidArgument,
    EnumerationLimit,
    Internal,
    ZeroVariance,
    RankDeficient,
    InsufficientRows,
    UnknownColumn,
    Schema,
    Io,
    Infeasible,
    NonConvergence,
};

constexpr std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Cycle: return "cycle";
    case ErrorKind::TimeOrder: return "time-order";
    case ErrorKind::DuplicateName: return "duplicate-name";
    case ErrorKind::UnknownNode: return "unknown-node";
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::EnumerationLimit: return "enumeration-limit";
    case ErrorKind::Internal: return "internal";
    case ErrorKind::ZeroVariance: return "zero-variance";
    case ErrorKind::RankDeficient: return "rank-deficient";
    case ErrorKind::InsufficientRows: return "insufficient-rows";
    case ErrorKind::UnknownColumn: return "unknown-column";
    case ErrorKind::Schema: return "schema";
    case ErrorKind::Io: return "io";
    case ErrorKind::Infeasible: return "infeasible";
    case ErrorKind::NonConvergence: return "non-convergence";
    }
    return "unknown";
}

// Every failure raised by the library carries a kind so callers (the CLI in
// particular) can map it onto exit codes without parsing messages.
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

} // namespace quartets
