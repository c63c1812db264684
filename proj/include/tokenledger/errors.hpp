#pragma once

#include <stdexcept>
#include <string>

namespace tokenledger {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input rejected by a domain invariant. `field()` names the offending field.
class ValidationError : public Error {
public:
    ValidationError(std::string field, const std::string& message)
        : Error(message), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

class NotFoundError : public Error {
public:
    using Error::Error;
};

/// Another operation of the same kind is already in flight.
class ConflictError : public Error {
public:
    using Error::Error;
};

class StorageError : public Error {
public:
    StorageError(const std::string& message, bool retriable) : Error(message), retriable_(retriable) {}
    bool retriable() const { return retriable_; }

private:
    bool retriable_;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

/// A provider call failed (transport, HTTP status, or undecodable body).
class UpstreamError : public Error {
public:
    UpstreamError(const std::string& message, std::string event_id)
        : Error(message), event_id_(std::move(event_id)) {}
    /// Telemetry event recorded for the failed call.
    const std::string& event_id() const { return event_id_; }

private:
    std::string event_id_;
};

}  // namespace tokenledger
