#pragma once

#include <stdexcept>
#include <string>

namespace qpcover {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed or mismatched mathematical objects (wrong quiver, bad covering data, ...).
class StructuralError : public Error {
public:
    explicit StructuralError(const std::string& msg) : Error(msg) {}
};

/// Bad user input: parse errors, dangling references, invalid options.
class InputError : public Error {
public:
    explicit InputError(const std::string& msg) : Error(msg) {}
};

/// A computation refused to answer (oracle validation failed, method unavailable).
class InconclusiveError : public Error {
public:
    explicit InconclusiveError(const std::string& msg) : Error(msg) {}
};

/// A search exceeded its configured resource guard.
class ResourceError : public Error {
public:
    explicit ResourceError(const std::string& msg) : Error(msg) {}
};

} // namespace qpcover
