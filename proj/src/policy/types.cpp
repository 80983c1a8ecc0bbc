/**
 * @file types.cpp
 */

#include "ehrgate/policy/types.hpp"

#include "ehrgate/common/error.hpp"

#include <cmath>
#include <sstream>

namespace ehrgate::policy {

std::string_view to_string(Role r) noexcept {
    switch (r) {
        case Role::patient: return "patient";
        case Role::physician: return "physician";
        case Role::records_officer: return "records_officer";
        case Role::admin: return "admin";
    }
    return "unknown";
}

std::optional<Role> try_parse_role(std::string_view text) noexcept {
    for (auto r : all_roles) {
        if (to_string(r) == text) return r;
    }
    return std::nullopt;
}

Role parse_role(std::string_view text) {
    if (auto r = try_parse_role(text)) return *r;
    throw parse_error("invalid role '" + std::string(text) + "'");
}

std::string_view to_string(AccessMode m) noexcept {
    return m == AccessMode::read ? "read" : "write";
}

std::optional<AccessMode> try_parse_mode(std::string_view text) noexcept {
    if (text == "read") return AccessMode::read;
    if (text == "write") return AccessMode::write;
    return std::nullopt;
}

AccessMode parse_mode(std::string_view text) {
    if (auto m = try_parse_mode(text)) return *m;
    throw parse_error("invalid access mode '" + std::string(text) + "'");
}

std::string to_string(const FieldValue& v) {
    if (auto s = std::get_if<std::string>(&v)) return *s;
    double d = std::get<double>(v);
    if (std::floor(d) == d && std::abs(d) < 1e15) {
        return std::to_string(static_cast<long long>(d));
    }
    std::ostringstream os;
    os << d;
    return os.str();
}

std::string_view to_string(ConnectReason r) noexcept {
    switch (r) {
        case ConnectReason::ok: return "ok";
        case ConnectReason::unknown_user: return "unknown_user";
        case ConnectReason::no_policy_for_role: return "no_policy_for_role";
    }
    return "unknown";
}

std::string_view to_string(AccessReason r) noexcept {
    switch (r) {
        case AccessReason::ok: return "ok";
        case AccessReason::no_matching_tuple: return "no_matching_tuple";
        case AccessReason::not_authenticated: return "not_authenticated";
    }
    return "unknown";
}

} // namespace ehrgate::policy
