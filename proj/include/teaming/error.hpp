#pragma once

#include <stdexcept>
#include <string>

namespace teaming {

// Every error the engine raises derives from Error so callers can map a
// whole class of failures (CLI exit codes, HTTP statuses) in one place.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line, std::size_t column)
        : Error(what), line_(line), column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

class EmptySkill : public Error {
public:
    using Error::Error;
};

class ArgumentError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class InsufficientSupply : public Error {
public:
    using Error::Error;
};

class TrainingDataError : public Error {
public:
    using Error::Error;
};

class NotFound : public Error {
public:
    using Error::Error;
};

// M3 was requested but no bandit model is loaded.
class ModelNotTrained : public Error {
public:
    using Error::Error;
};

}  // namespace teaming
