#pragma once

#include <stdexcept>
#include <string>

namespace labelrank {

// Exit-code contract: 0 success, 1 usage/config, 2 data, 3 transport.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
    virtual int exit_code() const noexcept { return 2; }
};

// Bad parameters, bad flags, invalid configuration.
class UsageError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 1; }
};

// Malformed or inconsistent input data.
class DataError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 2; }
};

// A remote provider answered outside its declared schema (wrong dimension,
// wrong row count, unparseable body).
class ContractError : public DataError {
public:
    using DataError::DataError;
};

// Network-level failure; carries the last HTTP status seen (0 = no response).
class TransportError : public Error {
public:
    explicit TransportError(const std::string& msg, int last_status = 0)
        : Error(msg), last_status(last_status) {}
    int exit_code() const noexcept override { return 3; }
    int last_status;
};

}  // namespace labelrank
