#pragma once

#include <stdexcept>
#include <string>

namespace jjr {

// Base for everything thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid physical parameters, bad config files, schema violations. CLI exit code 1.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

// Numerical failures: singular steady-state systems, eigensolver failures,
// step-size underflow (stiffness), truncation cap exceeded. CLI exit code 2.
class SolverError : public Error {
public:
    explicit SolverError(const std::string& msg) : Error(msg) {}
};

// File read/write failures. CLI exit code 3.
class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error(msg) {}
};

} // namespace jjr
