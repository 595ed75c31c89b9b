#pragma once

#include <stdexcept>
#include <string>

namespace lcinv {

/// Caller passed a value outside an operation's domain.
class ArgumentError : public std::invalid_argument {
public:
    explicit ArgumentError(const std::string& what) : std::invalid_argument(what) {}
};

/// Invalid run configuration (unknown key, bad value).
class ConfigError : public ArgumentError {
public:
    explicit ConfigError(const std::string& what) : ArgumentError(what) {}
};

/// View and sun directions (anti)parallel, so the H frame is undefined.
class DegenerateGeometryError : public std::runtime_error {
public:
    explicit DegenerateGeometryError(const std::string& what) : std::runtime_error(what) {}
};

class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed or inconsistent input data (files, tracklets, objects).
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace lcinv
