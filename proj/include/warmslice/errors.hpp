#pragma once

#include <stdexcept>
#include <string>

namespace warmslice {

/// Calibration table violates an invariant (bad bucket, negative std,
/// broken down-monotonicity, missing bucket at sample time).
class CalibrationError : public std::runtime_error {
public:
    explicit CalibrationError(const std::string& what) : std::runtime_error(what) {}
};

/// A document failed to parse; the message carries the line number.
class FormatError : public std::runtime_error {
public:
    FormatError(const std::string& what, std::size_t line)
        : std::runtime_error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// Scenario/config rejection; the message names the offending field path.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

class NotFoundError : public std::runtime_error {
public:
    explicit NotFoundError(const std::string& what) : std::runtime_error(what) {}
};

class AlreadyExistsError : public std::runtime_error {
public:
    explicit AlreadyExistsError(const std::string& what) : std::runtime_error(what) {}
};

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

/// Watcher gave up waiting for a patched value to become visible.
class WatchTimeout : public std::runtime_error {
public:
    explicit WatchTimeout(const std::string& what) : std::runtime_error(what) {}
};

/// Internal consistency guard (simulator bug, not user input).
class ProtocolError : public std::logic_error {
public:
    explicit ProtocolError(const std::string& what) : std::logic_error(what) {}
};

/// Latency was requested for a request that has not completed.
class NotFinished : public std::logic_error {
public:
    explicit NotFinished(const std::string& what) : std::logic_error(what) {}
};

}  // namespace warmslice
