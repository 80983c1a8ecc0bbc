/**
 * @file audit.cpp
 */

#include "ehrgate/store/audit.hpp"

#include <array>
#include <cstdio>

namespace ehrgate::store {

namespace {
constexpr std::array<std::string_view, 9> kind_names = {
    "register",       "login_success", "login_failure",
    "connect_establish", "connect_refuse", "access_granted",
    "access_denied",  "revoke",        "sweep",
};
} // namespace

std::string_view to_string(AuditKind k) noexcept { return kind_names[static_cast<std::size_t>(k)]; }

std::optional<AuditKind> parse_audit_kind(std::string_view text) noexcept {
    for (std::size_t i = 0; i < kind_names.size(); ++i) {
        if (kind_names[i] == text) return static_cast<AuditKind>(i);
    }
    return std::nullopt;
}

std::string format_audit_line(const AuditEvent& e) {
    char ts[32];
    std::snprintf(ts, sizeof ts, "%.3f", e.timestamp);
    std::string out = std::to_string(e.sequence);
    out += '\t';
    out += ts;
    out += '\t';
    out += e.correlation_id;
    out += '\t';
    out += e.actor_username;
    out += '\t';
    out += to_string(e.kind);
    out += '\t';
    out += e.detail.empty() ? "-" : e.detail;
    if (e.decision_fields) {
        out += '\t';
        out += e.decision_fields->empty() ? "{}" : e.decision_fields->to_string();
    }
    return out;
}

} // namespace ehrgate::store
