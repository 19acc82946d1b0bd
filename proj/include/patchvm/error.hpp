#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace patchvm {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed classfile text. Carries the 1-based position of the offending token.
class ParseError : public Error {
public:
    ParseError(std::size_t line, std::size_t column, const std::string& message);

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

class VerifyError : public Error {
public:
    using Error::Error;
};

class LinkError : public Error {
public:
    using Error::Error;
};

class DeadSession : public Error {
public:
    DeadSession() : Error("session is dead after a VM crash") {}
};

class LayoutChangeError : public Error {
public:
    using Error::Error;
};

class UnknownClassError : public Error {
public:
    using Error::Error;
};

class AlreadyTransformedError : public Error {
public:
    using Error::Error;
};

class UnknownTestError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class DigestMismatchError : public Error {
public:
    using Error::Error;
};

/// Failures that are not attributable to a patch (e.g. the user reset hook threw).
class HarnessError : public Error {
public:
    using Error::Error;
};

}  // namespace patchvm
