#pragma once

#include <stdexcept>
#include <string>

namespace ptq {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input / format problems (CLI exit code 2).
struct ParseError : Error {
    ParseError(const std::string& msg, int line, int column)
        : Error(msg + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")"),
          line(line), column(column) {}
    int line;
    int column;
};

struct ArityMismatch : Error {
    using Error::Error;
};

struct SymbolMismatch : Error {
    using Error::Error;
};

struct InvalidAnchor : Error {
    using Error::Error;
};

struct InvalidDecomposition : Error {
    using Error::Error;
};

struct NotWellDesigned : Error {
    using Error::Error;
};

struct RootHasNoParent : Error {
    using Error::Error;
};

struct UsageError : Error {
    using Error::Error;
};

// Resource limits (CLI exit code 3).
struct LimitError : Error {
    using Error::Error;
};

struct VertexLimit : LimitError {
    using LimitError::LimitError;
};

struct DomainLimit : LimitError {
    using LimitError::LimitError;
};

struct BudgetExceeded : LimitError {
    using LimitError::LimitError;
};

struct WidthCapExceeded : LimitError {
    using LimitError::LimitError;
};

struct CapExceeded : LimitError {
    CapExceeded(const std::string& msg, long count) : LimitError(msg), count(count) {}
    long count;
};

}  // namespace ptq
