/**
 * @file messages.cpp
 */

#include "ehrgate/agents/messages.hpp"

#include <type_traits>

namespace ehrgate::agents {

std::string_view to_string(AgentKind k) noexcept {
    switch (k) {
        case AgentKind::user_interface: return "user_interface";
        case AgentKind::authentication: return "authentication";
        case AgentKind::connection_establishment: return "connection_establishment";
        case AgentKind::connection_management: return "connection_management";
    }
    return "unknown";
}

std::string_view to_string(Status s) noexcept {
    switch (s) {
        case Status::ok: return "ok";
        case Status::validation_error: return "validation_error";
        case Status::invalid_credentials: return "invalid_credentials";
        case Status::duplicate_username: return "duplicate_username";
        case Status::not_authenticated: return "not_authenticated";
        case Status::access_denied: return "access_denied";
        case Status::not_found: return "not_found";
        case Status::overloaded: return "overloaded";
        case Status::storage_error: return "storage_error";
    }
    return "unknown";
}

namespace {

template <typename T>
void fail(const ReplySlot<T>& slot, const std::string& cid, Status status, std::string_view message) {
    if (!slot) return;
    T outcome;
    outcome.status = status;
    outcome.correlation_id = cid;
    outcome.message = std::string(message);
    try {
        slot->set_value(std::move(outcome));
    } catch (const std::future_error&) {
        // already answered
    }
}

} // namespace

void reject(AgentMessage& msg, Status status, std::string_view message) {
    std::visit(
        [&](auto& p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (!std::is_same_v<P, Shutdown>) fail(p.reply, msg.correlation_id, status, message);
        },
        msg.payload);
}

std::string_view payload_name(const Payload& p) noexcept {
    constexpr std::string_view names[] = {
        "RegisterUser", "LoginRequest", "EstablishSession", "SessionEstablished",
        "AccessRequestMsg", "AuditQuery", "SessionCheck", "RevokeSession",
        "ExpireSweep", "AuthResult", "AccessResult", "RegisterResult",
        "RevokeResult", "SweepResult", "CheckResult", "AuditResult", "Shutdown",
    };
    static_assert(std::size(names) == std::variant_size_v<Payload>);
    return names[p.index()];
}

} // namespace ehrgate::agents
