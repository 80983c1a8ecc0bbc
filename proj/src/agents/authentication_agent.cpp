/**
 * @file authentication_agent.cpp
 */

#include "ehrgate/agents/agents.hpp"

#include "ehrgate/common/error.hpp"
#include "ehrgate/policy/evaluate.hpp"

#include <type_traits>

namespace ehrgate::agents {

using namespace ehrgate::policy;
using store::AuditEvent;
using store::AuditKind;

namespace {

/// Externally uniform message for every authentication failure.
constexpr std::string_view invalid_credentials_message = "invalid credentials";

std::string describe(const AccessRequestMsg& m) {
    return "mode=" + std::string(to_string(m.mode)) + " file=" + m.file_id +
           " requested=" + (m.requested.empty() ? std::string("{}") : m.requested.to_string()) +
           " session=valid";
}

} // namespace

AuthenticationAgent::AuthenticationAgent(Router& router, store::HealthStore& store,
                                         AuthenticationOptions options, std::size_t inbox_bound)
    : Agent(AgentKind::authentication, inbox_bound), router_(router), store_(store), options_(options) {}

void AuthenticationAgent::handle(AgentMessage msg) {
    const std::string& cid = msg.correlation_id;
    try {
        if (auto* m = std::get_if<RegisterUser>(&msg.payload)) {
            on_register(cid, *m);
        } else if (auto* m = std::get_if<LoginRequest>(&msg.payload)) {
            on_login(cid, *m);
        } else if (auto* m = std::get_if<AccessRequestMsg>(&msg.payload)) {
            on_access(cid, *m);
        } else if (auto* m = std::get_if<AuditQuery>(&msg.payload)) {
            on_audit(cid, *m);
        } else {
            reject(msg, Status::validation_error, "unexpected message");
        }
    } catch (const storage_io& e) {
        reject(msg, Status::storage_error, e.what());
    }
}

void AuthenticationAgent::on_register(const std::string& cid, RegisterUser& m) {
    Result<RegisterOutcome> r{{}, m.reply};
    try {
        User user;
        user.username = m.username;
        user.role = m.role;
        auto stored = store_.put_user(std::move(user), m.password, cid);
        r.outcome.user_id = stored.user_id;
    } catch (const duplicate_username& e) {
        r.outcome.status = Status::duplicate_username;
        r.outcome.message = e.what();
    } catch (const validation_error& e) {
        r.outcome.status = Status::validation_error;
        r.outcome.message = e.what();
    }
    router_.send(AgentKind::user_interface, {cid, std::move(r)});
}

void AuthenticationAgent::on_login(const std::string& cid, LoginRequest& m) {
    auto verdict = store_.verify_credentials(m.username, m.password);
    if (!verdict.ok()) {
        AuditEvent e;
        e.correlation_id = cid;
        e.actor_username = store::normalize_username(m.username);
        e.kind = AuditKind::login_failure;
        e.detail = std::string(store::to_string(verdict.status));
        store_.append_audit(std::move(e));

        AuthResult r{{}, m.reply, options_.fail_delay};
        r.outcome.status = Status::invalid_credentials;
        r.outcome.message = std::string(invalid_credentials_message);
        router_.send(AgentKind::user_interface, {cid, std::move(r)});
        return;
    }

    AuditEvent e;
    e.correlation_id = cid;
    e.actor_username = verdict.user->username;
    e.kind = AuditKind::login_success;
    e.detail = "role=" + std::string(to_string(verdict.user->role));
    store_.append_audit(std::move(e));

    router_.send(AgentKind::connection_establishment,
                 {cid, EstablishSession{std::move(*verdict.user), m.reply}});
}

void AuthenticationAgent::on_access(const std::string& cid, AccessRequestMsg& m) {
    AccessResult r{{}, m.reply};
    auto requester = m.identity ? store_.find_user_by_id(m.identity->user_id()) : std::nullopt;
    if (!requester) {
        r.outcome.status = Status::not_authenticated;
        r.outcome.message = "session does not map to a user";
        r.outcome.decision = AccessDecision::deny(AccessReason::not_authenticated);
        router_.send(AgentKind::user_interface, {cid, std::move(r)});
        return;
    }

    AccessRequest request{requester->user_id, m.mode, m.file_id, m.requested};
    // Unsafe mode behaves as if every role held a wildcard tuple for every file.
    AccessDecision decision = options_.unsafe_allow_all
                                  ? AccessDecision::grant(intersect(FieldSet::wildcard(), m.requested))
                                  : evaluate_access(request, *requester, store_.policy_table());
    std::string detail = describe(m);
    if (decision.granted() && m.mode == AccessMode::write && !m.requested.is_subset_of(decision.granted_fields)) {
        auto ungranted = FieldSet::from_bits(m.requested.bits() & ~decision.granted_fields.bits());
        detail += " strict_write ungranted=" + ungranted.to_string();
        decision = AccessDecision::deny(AccessReason::no_matching_tuple);
    }
    detail += " reason=" + std::string(to_string(decision.reason));

    AuditEvent e;
    e.correlation_id = cid;
    e.actor_username = requester->username;
    e.kind = decision.granted() ? AuditKind::access_granted : AuditKind::access_denied;
    e.detail = std::move(detail);
    if (decision.granted()) e.decision_fields = decision.granted_fields;
    store_.append_audit(std::move(e));

    r.outcome.decision = decision;
    if (!decision.granted()) {
        r.outcome.status = Status::access_denied;
        r.outcome.message = "access denied";
    } else if (auto record = store_.get_record(m.file_id); !record) {
        r.outcome.status = Status::not_found;
        r.outcome.message = "record not found";
    } else if (m.mode == AccessMode::read) {
        r.outcome.record = filter_record(*record, decision.granted_fields);
    } else {
        HealthRecord written{record->file_id, record->owner_user_id, m.write_values};
        for (const auto& [field, value] : m.write_values) record->values[field] = value;
        store_.put_record(*record);
        r.outcome.record = std::move(written);
    }
    router_.send(AgentKind::user_interface, {cid, std::move(r)});
}

void AuthenticationAgent::on_audit(const std::string& cid, AuditQuery& m) {
    Result<AuditOutcome> r{{}, m.reply};
    auto requester = m.identity ? store_.find_user_by_id(m.identity->user_id()) : std::nullopt;
    if (!requester) {
        r.outcome.status = Status::not_authenticated;
        r.outcome.message = "session does not map to a user";
    } else if (requester->role != Role::admin) {
        r.outcome.status = Status::access_denied;
        r.outcome.message = "audit log requires the admin role";
    } else {
        r.outcome.events = store_.read_audit(m.from);
    }
    router_.send(AgentKind::user_interface, {cid, std::move(r)});
}

} // namespace ehrgate::agents
