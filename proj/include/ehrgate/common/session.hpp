/**
 * @file session.hpp
 * @brief An established connection: bearer token bound to a user
 */

#pragma once

#include <string>

namespace ehrgate {

struct Session {
    std::string token; ///< 64 lowercase hex chars
    std::string user_id;
    double established_at = 0;
    double expires_at = 0;
    bool revoked = false;

    /// Expiry is exclusive: a session is dead at exactly expires_at.
    bool valid_at(double now) const noexcept { return !revoked && now < expires_at; }

    bool operator==(const Session&) const = default;
};

} // namespace ehrgate
