/**
 * @file connection_establishment_agent.cpp
 */

#include "ehrgate/agents/agents.hpp"

#include "ehrgate/common/error.hpp"
#include "ehrgate/crypto/crypto.hpp"
#include "ehrgate/policy/evaluate.hpp"

namespace ehrgate::agents {

using store::AuditEvent;
using store::AuditKind;

ConnectionEstablishmentAgent::ConnectionEstablishmentAgent(Router& router, store::HealthStore& store,
                                                           double session_ttl,
                                                           std::chrono::milliseconds fail_delay,
                                                           Clock clock, std::size_t inbox_bound)
    : Agent(AgentKind::connection_establishment, inbox_bound),
      router_(router),
      store_(store),
      ttl_(session_ttl),
      fail_delay_(fail_delay),
      clock_(std::move(clock)) {}

void ConnectionEstablishmentAgent::handle(AgentMessage msg) {
    auto* m = std::get_if<EstablishSession>(&msg.payload);
    if (m == nullptr) {
        reject(msg, Status::validation_error, "unexpected message");
        return;
    }
    const std::string& cid = msg.correlation_id;
    try {
        auto users = store_.users();
        auto decision = policy::evaluate_connection(m->user.username, users, store_.policy_table());
        if (!decision.established()) {
            AuditEvent e;
            e.correlation_id = cid;
            e.actor_username = m->user.username;
            e.kind = AuditKind::connect_refuse;
            e.detail = std::string(policy::to_string(decision.reason));
            store_.append_audit(std::move(e));

            // Same answer as a bad password.
            AuthResult r{{}, m->reply, fail_delay_};
            r.outcome.status = Status::invalid_credentials;
            r.outcome.message = "invalid credentials";
            router_.send(AgentKind::user_interface, {cid, std::move(r)});
            return;
        }

        Session session;
        do {
            session.token = crypto::random_token();
        } while (store_.token_known(session.token));
        session.user_id = m->user.user_id;
        session.established_at = clock_();
        session.expires_at = session.established_at + ttl_;
        store_.put_session(session);

        AuditEvent e;
        e.correlation_id = cid;
        e.actor_username = m->user.username;
        e.kind = AuditKind::connect_establish;
        e.detail = "expires_at=" + std::to_string(session.expires_at);
        store_.append_audit(std::move(e));

        router_.send(AgentKind::connection_management,
                     {cid, SessionEstablished{std::move(session), m->user.role, m->reply}});
    } catch (const storage_io& e) {
        reject(msg, Status::storage_error, e.what());
    }
}

} // namespace ehrgate::agents
