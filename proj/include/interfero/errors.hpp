#pragma once

#include <stdexcept>
#include <string>

namespace interfero {

enum class ErrorCode {
    syntax,
    semantic,
    lossless_violation,
    mode_mismatch,
    not_normalized,
    unbound_parameter,
    truncation_too_small,
    corrupt_record,
    insufficient_data,
    invalid_argument,
    config,
    io,
    stats_acceptance,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

struct LosslessViolation : Error {
    explicit LosslessViolation(const std::string& w) : Error(ErrorCode::lossless_violation, w) {}
};

struct ModeMismatch : Error {
    explicit ModeMismatch(const std::string& w) : Error(ErrorCode::mode_mismatch, w) {}
};

struct NotNormalized : Error {
    explicit NotNormalized(const std::string& w) : Error(ErrorCode::not_normalized, w) {}
};

struct UnboundParameter : Error {
    explicit UnboundParameter(const std::string& w) : Error(ErrorCode::unbound_parameter, w) {}
};

struct TruncationTooSmall : Error {
    explicit TruncationTooSmall(const std::string& w) : Error(ErrorCode::truncation_too_small, w) {}
};

struct CorruptRecord : Error {
    explicit CorruptRecord(const std::string& w) : Error(ErrorCode::corrupt_record, w) {}
};

struct InsufficientData : Error {
    explicit InsufficientData(const std::string& w) : Error(ErrorCode::insufficient_data, w) {}
};

struct InvalidArgument : Error {
    explicit InvalidArgument(const std::string& w) : Error(ErrorCode::invalid_argument, w) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& w) : Error(ErrorCode::config, w) {}
};

struct IoError : Error {
    explicit IoError(const std::string& w) : Error(ErrorCode::io, w) {}
};

struct StatsAcceptanceError : Error {
    explicit StatsAcceptanceError(const std::string& w) : Error(ErrorCode::stats_acceptance, w) {}
};

/// Parse-time error with a source location. `expected` lists what the parser
/// would have accepted at the failure point.
class SyntaxError : public Error {
public:
    SyntaxError(const std::string& source, int line, int column, const std::string& message)
        : Error(ErrorCode::syntax,
                source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + message),
          line_(line),
          column_(column) {}

    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    int line_;
    int column_;
};

class SemanticError : public Error {
public:
    SemanticError(const std::string& source, int line, int column, const std::string& message)
        : Error(ErrorCode::semantic,
                source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + message),
          line_(line),
          column_(column) {}

    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    int line_;
    int column_;
};

}  // namespace interfero
