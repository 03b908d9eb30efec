#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace trendvote {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input record; line is 1-based, 0 when unknown.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class TemplateError : public Error {
public:
    using Error::Error;
};

class BackendError : public Error {
public:
    using Error::Error;
};

// Model output from which no label in the requested set could be read.
class LabelParseError : public BackendError {
public:
    explicit LabelParseError(std::string raw)
        : BackendError("no label found in model output: \"" + raw + "\""), raw_(std::move(raw)) {}
    const std::string& raw() const noexcept { return raw_; }

private:
    std::string raw_;
};

// Non-retryable remote failure (HTTP 4xx other than rate limiting).
class FatalBackendError : public BackendError {
public:
    FatalBackendError(const std::string& what, int status = 0) : BackendError(what), status_(status) {}
    int status() const noexcept { return status_; }

private:
    int status_;
};

class TransportError : public BackendError {
public:
    using BackendError::BackendError;
};

class CacheMissError : public BackendError {
public:
    explicit CacheMissError(std::string digest)
        : BackendError("cache miss in replay mode: " + digest), digest_(std::move(digest)) {}
    const std::string& digest() const noexcept { return digest_; }

private:
    std::string digest_;
};

class CacheIntegrityError : public Error {
public:
    using Error::Error;
};

}  // namespace trendvote
