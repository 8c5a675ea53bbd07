#pragma once

#include <stdexcept>
#include <string>

namespace nae {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed input data (annotation files, images, field/checkpoint blobs).
/// Carries the source name and a 1-based line number when one is known
/// (line 0 means "not applicable", e.g. binary formats).
class ParseError : public Error {
public:
    ParseError(std::string source, int line, const std::string& msg)
        : Error(format(source, line, msg)), source_(std::move(source)), line_(line) {}

    const std::string& source() const noexcept { return source_; }
    int line() const noexcept { return line_; }

private:
    static std::string format(const std::string& source, int line, const std::string& msg) {
        std::string out = source.empty() ? "<input>" : source;
        if (line > 0) out += ":" + std::to_string(line);
        out += ": " + msg;
        return out;
    }

    std::string source_;
    int line_;
};

/// Invalid configuration value (bad alpha, bad crop size, unknown mode).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Tensor or geometry shape mismatch.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// API misuse (e.g. backward before forward).
class UsageError : public Error {
public:
    using Error::Error;
};

/// Filesystem failures, annotated with the offending path.
class IoError : public Error {
public:
    IoError(const std::string& path, const std::string& msg)
        : Error(path + ": " + msg), path_(path) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

/// Scene generation could not satisfy the separation constraint.
class PackingError : public Error {
public:
    using Error::Error;
};

}  // namespace nae
