/**
 * @file agents.hpp
 * @brief The four agents of the access-control pipeline
 *
 *     caller -> user_interface -> authentication -> connection_establishment
 *                    ^                  |                     |
 *                    |                  v                     v
 *                    +-------- connection_management <--------+
 *
 * Login travels UI -> auth -> establishment -> management -> UI. Record
 * access travels UI -> management (session check) -> auth (policy) -> UI.
 */

#pragma once

#include "ehrgate/agents/agent.hpp"
#include "ehrgate/agents/delay_queue.hpp"
#include "ehrgate/common/config.hpp"
#include "ehrgate/store/health_store.hpp"

#include <map>

namespace ehrgate::agents {

/**
 * @brief Entry and exit point. Validates message shape only and owns the
 * caller-facing reply slots.
 */
class UserInterfaceAgent final : public Agent {
public:
    UserInterfaceAgent(Router& router, DelayQueue& delays, std::size_t inbox_bound);

protected:
    void handle(AgentMessage msg) override;

private:
    Router& router_;
    DelayQueue& delays_;
};

struct AuthenticationOptions {
    std::chrono::milliseconds fail_delay{200};
    /// Replaces every policy decision with "granted, all fields". Harness
    /// self-test only.
    bool unsafe_allow_all = false;
};

/**
 * @brief Verifies credentials, registers users and makes the file-access
 * decision once a session has been vouched for.
 */
class AuthenticationAgent final : public Agent {
public:
    AuthenticationAgent(Router& router, store::HealthStore& store, AuthenticationOptions options,
                        std::size_t inbox_bound);

protected:
    void handle(AgentMessage msg) override;

private:
    void on_register(const std::string& cid, RegisterUser& m);
    void on_login(const std::string& cid, LoginRequest& m);
    void on_access(const std::string& cid, AccessRequestMsg& m);
    void on_audit(const std::string& cid, AuditQuery& m);

    Router& router_;
    store::HealthStore& store_;
    AuthenticationOptions options_;
};

/// Runs the connection gate and mints sessions.
class ConnectionEstablishmentAgent final : public Agent {
public:
    ConnectionEstablishmentAgent(Router& router, store::HealthStore& store, double session_ttl,
                                 std::chrono::milliseconds fail_delay, Clock clock,
                                 std::size_t inbox_bound);

protected:
    void handle(AgentMessage msg) override;

private:
    Router& router_;
    store::HealthStore& store_;
    double ttl_;
    std::chrono::milliseconds fail_delay_;
    Clock clock_;
};

/// Owns the live session table: check, revoke, sweep.
class ConnectionManagementAgent final : public Agent {
public:
    ConnectionManagementAgent(Router& router, store::HealthStore& store, Clock clock,
                              std::size_t inbox_bound);

protected:
    void handle(AgentMessage msg) override;

private:
    /// user_id if valid at @p now.
    std::optional<std::string> check(const std::string& token, double now) const;
    bool revoke(const std::string& token, const std::string& cid);
    std::size_t sweep(double now, const std::string& cid);

    Router& router_;
    store::HealthStore& store_;
    Clock clock_;
    std::map<std::string, Session, std::less<>> live_;
};

} // namespace ehrgate::agents
