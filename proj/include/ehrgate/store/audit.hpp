/**
 * @file audit.hpp
 * @brief Append-only audit trail entries
 */

#pragma once

#include "ehrgate/policy/field.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace ehrgate::store {

enum class AuditKind : std::uint8_t {
    register_user, ///< serialized as "register"
    login_success,
    login_failure,
    connect_establish,
    connect_refuse,
    access_granted,
    access_denied,
    revoke,
    sweep,
};

std::string_view to_string(AuditKind k) noexcept;
std::optional<AuditKind> parse_audit_kind(std::string_view text) noexcept;

struct AuditEvent {
    std::uint64_t sequence = 0;
    double timestamp = 0;
    std::string correlation_id;
    std::string actor_username = "-";
    AuditKind kind = AuditKind::register_user;
    std::string detail;
    std::optional<policy::FieldSet> decision_fields;

    bool operator==(const AuditEvent&) const = default;
};

/// Tab-separated single line, as printed by `audit-tail`.
std::string format_audit_line(const AuditEvent& e);

} // namespace ehrgate::store
