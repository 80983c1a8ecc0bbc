/**
 * @file error.hpp
 * @brief Exception types shared by every ehrgate module
 */

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ehrgate {

/**
 * @brief Base class of all errors raised by the library.
 */
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input text that does not follow a documented format.
class parse_error : public error {
public:
    parse_error(const std::string& what, std::size_t line = 0)
        : error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

    /// 1-based line number, 0 when not line-oriented.
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A value violates a domain invariant (unknown role, empty username, ...).
class validation_error : public error {
public:
    using error::error;
};

class duplicate_username : public error {
public:
    using error::error;
};

/// Filesystem failure underneath the store.
class storage_io : public error {
public:
    using error::error;
};

} // namespace ehrgate
