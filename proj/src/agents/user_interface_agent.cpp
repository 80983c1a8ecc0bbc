/**
 * @file user_interface_agent.cpp
 */

#include "ehrgate/agents/agents.hpp"

#include "ehrgate/store/health_store.hpp"

#include <type_traits>

namespace ehrgate::agents {

namespace {

template <typename T>
void deliver(Result<T>& r, const std::string& cid) {
    if (!r.reply) return;
    r.outcome.correlation_id = cid;
    try {
        r.reply->set_value(std::move(r.outcome));
    } catch (const std::future_error&) {
    }
}

} // namespace

UserInterfaceAgent::UserInterfaceAgent(Router& router, DelayQueue& delays, std::size_t inbox_bound)
    : Agent(AgentKind::user_interface, inbox_bound), router_(router), delays_(delays) {}

void UserInterfaceAgent::handle(AgentMessage msg) {
    const std::string cid = msg.correlation_id;
    std::visit(
        [&](auto& p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, RegisterUser>) {
                if (store::normalize_username(p.username).empty() || p.password.empty()) {
                    reject(msg, Status::validation_error, "username and password are required");
                } else if (p.role == policy::Role::admin && !p.allow_admin) {
                    reject(msg, Status::validation_error, "role admin cannot be self-registered");
                } else {
                    router_.send(AgentKind::authentication, std::move(msg));
                }
            } else if constexpr (std::is_same_v<P, LoginRequest>) {
                if (store::normalize_username(p.username).empty() || p.password.empty()) {
                    reject(msg, Status::validation_error, "username and password are required");
                } else {
                    router_.send(AgentKind::authentication, std::move(msg));
                }
            } else if constexpr (std::is_same_v<P, AccessRequestMsg>) {
                if (p.identity) {
                    // identities are minted downstream only
                    reject(msg, Status::validation_error, "malformed request");
                } else if (p.token.empty()) {
                    AccessResult r{{Status::not_authenticated, cid, "missing session token",
                                    policy::AccessDecision::deny(policy::AccessReason::not_authenticated),
                                    std::nullopt},
                                   p.reply};
                    deliver(r, cid);
                } else if (p.file_id.empty()) {
                    reject(msg, Status::validation_error, "file_id is required");
                } else if (p.mode == policy::AccessMode::write && p.write_values.empty()) {
                    reject(msg, Status::validation_error, "no values to write");
                } else {
                    router_.send(AgentKind::connection_management, std::move(msg));
                }
            } else if constexpr (std::is_same_v<P, AuditQuery>) {
                if (p.identity) {
                    reject(msg, Status::validation_error, "malformed request");
                } else {
                    router_.send(AgentKind::connection_management, std::move(msg));
                }
            } else if constexpr (std::is_same_v<P, SessionCheck> || std::is_same_v<P, RevokeSession> ||
                                 std::is_same_v<P, ExpireSweep>) {
                router_.send(AgentKind::connection_management, std::move(msg));
            } else if constexpr (std::is_same_v<P, SessionEstablished>) {
                LoginOutcome out;
                out.status = Status::ok;
                out.correlation_id = cid;
                out.session = p.session;
                out.role = p.role;
                try {
                    if (p.reply) p.reply->set_value(std::move(out));
                } catch (const std::future_error&) {
                }
            } else if constexpr (std::is_same_v<P, AuthResult> || std::is_same_v<P, AccessResult> ||
                                 std::is_same_v<P, Result<RegisterOutcome>> ||
                                 std::is_same_v<P, Result<RevokeOutcome>> ||
                                 std::is_same_v<P, Result<SweepOutcome>> ||
                                 std::is_same_v<P, Result<CheckOutcome>> ||
                                 std::is_same_v<P, Result<AuditOutcome>>) {
                if (p.delay.count() > 0) {
                    auto result = std::make_shared<P>(std::move(p));
                    delays_.schedule(result->delay, [result, cid] { deliver(*result, cid); });
                } else {
                    deliver(p, cid);
                }
            } else {
                reject(msg, Status::validation_error, "unexpected message");
            }
        },
        msg.payload);
}

} // namespace ehrgate::agents
