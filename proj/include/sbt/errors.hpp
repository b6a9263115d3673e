#pragma once

#include <stdexcept>
#include <string>

namespace sbt {

// Bad flags, bad parameters, violated preconditions on arguments.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Input data that cannot be interpreted: ragged rows, unmappable tokens,
// empty groups.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public DataError {
public:
    ParseError(const std::string& what, long line) : DataError(what), line_(line) {}
    long line() const noexcept { return line_; }

private:
    long line_;
};

}  // namespace sbt
