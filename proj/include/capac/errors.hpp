#pragma once

#include <stdexcept>
#include <string>

namespace capac {

/// Error categories map 1:1 to CLI exit codes and to the "kind" field of the
/// machine-readable error object printed on failure.
enum class ErrorKind { Config = 2, Geometry = 3, Numeric = 4, Io = 5 };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string message)
        : std::runtime_error(message), kind_(kind) {}
    ErrorKind kind() const { return kind_; }
    int exit_code() const { return static_cast<int>(kind_); }
    const char* kind_name() const {
        switch (kind_) {
            case ErrorKind::Config: return "config";
            case ErrorKind::Geometry: return "geometry";
            case ErrorKind::Numeric: return "numeric";
            case ErrorKind::Io: return "io";
        }
        return "unknown";
    }

private:
    ErrorKind kind_;
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& m) : Error(ErrorKind::Config, m) {}
};
struct GeometryError : Error {
    explicit GeometryError(const std::string& m) : Error(ErrorKind::Geometry, m) {}
};
struct NumericError : Error {
    explicit NumericError(const std::string& m) : Error(ErrorKind::Numeric, m) {}
};
struct IoError : Error {
    explicit IoError(const std::string& m) : Error(ErrorKind::Io, m) {}
};

} // namespace capac
