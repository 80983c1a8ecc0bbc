/**
 * @file messages.hpp
 * @brief Message vocabulary exchanged between the four agents
 *
 * Every message carries the correlation id of the interaction it belongs
 * to. Request payloads carry the caller's reply slot along the pipeline;
 * only the user-interface agent fulfills it.
 */

#pragma once

#include "ehrgate/common/session.hpp"
#include "ehrgate/policy/types.hpp"
#include "ehrgate/store/audit.hpp"

#include <chrono>
#include <future>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace ehrgate::agents {

enum class AgentKind : std::uint8_t {
    user_interface,
    authentication,
    connection_establishment,
    connection_management,
};

std::string_view to_string(AgentKind k) noexcept;

/// Outcome category of an interaction, mapped onto HTTP by the gateway.
enum class Status : std::uint8_t {
    ok,
    validation_error,
    invalid_credentials,
    duplicate_username,
    not_authenticated,
    access_denied,
    not_found,
    overloaded,
    storage_error,
};

std::string_view to_string(Status s) noexcept;

struct RegisterOutcome {
    Status status = Status::ok;
    std::string correlation_id;
    std::string message;
    std::string user_id;
};

struct LoginOutcome {
    Status status = Status::ok;
    std::string correlation_id;
    std::string message;
    Session session;
    policy::Role role = policy::Role::patient;
};

struct AccessOutcome {
    Status status = Status::ok;
    std::string correlation_id;
    std::string message;
    policy::AccessDecision decision;
    /// Read: the filtered record. Write: the fields that were written.
    std::optional<policy::HealthRecord> record;
};

struct RevokeOutcome {
    Status status = Status::ok;
    std::string correlation_id;
    std::string message;
    bool revoked = false; ///< false when the token was unknown or already revoked
};

struct SweepOutcome {
    Status status = Status::ok;
    std::string correlation_id;
    std::string message;
    std::size_t purged = 0;
};

struct CheckOutcome {
    Status status = Status::ok;
    std::string correlation_id;
    std::string message;
    std::optional<std::string> user_id; ///< set iff the session is valid
};

struct AuditOutcome {
    Status status = Status::ok;
    std::string correlation_id;
    std::string message;
    std::vector<store::AuditEvent> events;
};

template <typename T>
using ReplySlot = std::shared_ptr<std::promise<T>>;

/**
 * @brief Proof that the connection-management agent found a valid session.
 *
 * Only that agent can mint one, so the authentication agent cannot evaluate
 * an access request that skipped the session check.
 */
class VerifiedIdentity {
public:
    const std::string& user_id() const noexcept { return user_id_; }
    double checked_at() const noexcept { return checked_at_; }

private:
    friend class ConnectionManagementAgent;
    VerifiedIdentity(std::string user_id, double checked_at)
        : user_id_(std::move(user_id)), checked_at_(checked_at) {}

    std::string user_id_;
    double checked_at_;
};

struct RegisterUser {
    std::string username;
    std::string password;
    policy::Role role = policy::Role::patient;
    bool allow_admin = false;
    ReplySlot<RegisterOutcome> reply;
};

struct LoginRequest {
    std::string username;
    std::string password;
    ReplySlot<LoginOutcome> reply;
};

struct EstablishSession {
    policy::User user;
    ReplySlot<LoginOutcome> reply;
};

struct SessionEstablished {
    Session session;
    policy::Role role = policy::Role::patient;
    ReplySlot<LoginOutcome> reply;
};

struct AccessRequestMsg {
    std::string token;
    policy::AccessMode mode = policy::AccessMode::read;
    std::string file_id;
    policy::FieldSet requested = policy::FieldSet::wildcard();
    std::map<policy::FieldId, policy::FieldValue> write_values;
    std::optional<VerifiedIdentity> identity;
    ReplySlot<AccessOutcome> reply;
};

struct AuditQuery {
    std::string token;
    std::uint64_t from = 1;
    std::optional<VerifiedIdentity> identity;
    ReplySlot<AuditOutcome> reply;
};

struct SessionCheck {
    std::string token;
    std::optional<double> now;
    ReplySlot<CheckOutcome> reply;
};

struct RevokeSession {
    std::string token;
    ReplySlot<RevokeOutcome> reply;
};

struct ExpireSweep {
    std::optional<double> now;
    ReplySlot<SweepOutcome> reply; ///< null for timer-driven sweeps
};

/// Final answer travelling back to the user-interface agent.
template <typename T>
struct Result {
    T outcome;
    ReplySlot<T> reply;
    std::chrono::milliseconds delay{0};
};

using AuthResult = Result<LoginOutcome>;
using AccessResult = Result<AccessOutcome>;

struct Shutdown {};

using Payload = std::variant<RegisterUser, LoginRequest, EstablishSession, SessionEstablished,
                             AccessRequestMsg, AuditQuery, SessionCheck, RevokeSession,
                             ExpireSweep, AuthResult, AccessResult, Result<RegisterOutcome>,
                             Result<RevokeOutcome>, Result<SweepOutcome>, Result<CheckOutcome>,
                             Result<AuditOutcome>, Shutdown>;

struct AgentMessage {
    std::string correlation_id;
    Payload payload;
};

/// Answers whatever reply slot @p msg carries with @p status.
void reject(AgentMessage& msg, Status status, std::string_view message);

/// Human-readable payload name, for logs and traces.
std::string_view payload_name(const Payload& p) noexcept;

} // namespace ehrgate::agents
