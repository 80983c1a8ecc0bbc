/**
 * @file connection_management_agent.cpp
 */

#include "ehrgate/agents/agents.hpp"

#include "ehrgate/common/error.hpp"

#include <type_traits>

namespace ehrgate::agents {

using store::AuditEvent;
using store::AuditKind;

ConnectionManagementAgent::ConnectionManagementAgent(Router& router, store::HealthStore& store,
                                                     Clock clock, std::size_t inbox_bound)
    : Agent(AgentKind::connection_management, inbox_bound),
      router_(router),
      store_(store),
      clock_(std::move(clock)) {
    for (auto& s : store_.sessions()) live_.emplace(s.token, std::move(s));
}

std::optional<std::string> ConnectionManagementAgent::check(const std::string& token, double now) const {
    auto it = live_.find(token);
    if (it == live_.end() || !it->second.valid_at(now)) return std::nullopt;
    return it->second.user_id;
}

bool ConnectionManagementAgent::revoke(const std::string& token, const std::string& cid) {
    auto it = live_.find(token);
    if (it == live_.end() || it->second.revoked) return false;
    Session updated = it->second;
    updated.revoked = true;
    store_.put_session(updated);
    it->second = updated;

    AuditEvent e;
    e.correlation_id = cid;
    if (auto user = store_.find_user_by_id(updated.user_id)) e.actor_username = user->username;
    e.kind = AuditKind::revoke;
    e.detail = "token=" + token.substr(0, 8) + "...";
    store_.append_audit(std::move(e));
    return true;
}

std::size_t ConnectionManagementAgent::sweep(double now, const std::string& cid) {
    std::vector<std::string> expired;
    for (const auto& [token, s] : live_) {
        if (s.expires_at <= now) expired.push_back(token);
    }
    if (expired.empty()) return 0;
    store_.purge_sessions(expired);
    for (const auto& token : expired) live_.erase(token);

    AuditEvent e;
    e.correlation_id = cid;
    e.kind = AuditKind::sweep;
    e.detail = "purged=" + std::to_string(expired.size());
    store_.append_audit(std::move(e));
    return expired.size();
}

void ConnectionManagementAgent::handle(AgentMessage msg) {
    const std::string cid = msg.correlation_id;
    try {
        std::visit(
            [&](auto& p) {
                using P = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<P, SessionEstablished>) {
                    live_[p.session.token] = p.session;
                    router_.send(AgentKind::user_interface, std::move(msg));
                } else if constexpr (std::is_same_v<P, AccessRequestMsg> || std::is_same_v<P, AuditQuery>) {
                    double now = clock_();
                    if (auto user_id = check(p.token, now)) {
                        p.identity = VerifiedIdentity(std::move(*user_id), now);
                        router_.send(AgentKind::authentication, std::move(msg));
                    } else if constexpr (std::is_same_v<P, AccessRequestMsg>) {
                        AccessResult r{{}, p.reply};
                        r.outcome.status = Status::not_authenticated;
                        r.outcome.message = "invalid or expired session";
                        r.outcome.decision =
                            policy::AccessDecision::deny(policy::AccessReason::not_authenticated);
                        router_.send(AgentKind::user_interface, {cid, std::move(r)});
                    } else {
                        Result<AuditOutcome> r{{}, p.reply};
                        r.outcome.status = Status::not_authenticated;
                        r.outcome.message = "invalid or expired session";
                        router_.send(AgentKind::user_interface, {cid, std::move(r)});
                    }
                } else if constexpr (std::is_same_v<P, SessionCheck>) {
                    Result<CheckOutcome> r{{}, p.reply};
                    r.outcome.user_id = check(p.token, p.now.value_or(clock_()));
                    router_.send(AgentKind::user_interface, {cid, std::move(r)});
                } else if constexpr (std::is_same_v<P, RevokeSession>) {
                    Result<RevokeOutcome> r{{}, p.reply};
                    r.outcome.revoked = revoke(p.token, cid);
                    router_.send(AgentKind::user_interface, {cid, std::move(r)});
                } else if constexpr (std::is_same_v<P, ExpireSweep>) {
                    std::size_t purged = sweep(p.now.value_or(clock_()), cid);
                    if (p.reply) {
                        Result<SweepOutcome> r{{}, p.reply};
                        r.outcome.purged = purged;
                        router_.send(AgentKind::user_interface, {cid, std::move(r)});
                    }
                } else {
                    reject(msg, Status::validation_error, "unexpected message");
                }
            },
            msg.payload);
    } catch (const storage_io& e) {
        reject(msg, Status::storage_error, e.what());
    }
}

} // namespace ehrgate::agents
