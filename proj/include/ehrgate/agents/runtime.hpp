/**
 * @file runtime.hpp
 * @brief Hosts the four agents in one process and exposes future-based calls
 */

#pragma once

#include "ehrgate/agents/agents.hpp"

#include <condition_variable>
#include <future>
#include <memory>
#include <mutex>
#include <thread>

namespace ehrgate::agents {

struct RuntimeOptions {
    double session_ttl_seconds = 3600;
    std::chrono::milliseconds auth_fail_delay{200};
    double sweep_interval_seconds = 60; ///< <= 0 disables the periodic sweep
    std::size_t queue_bound = 1024;
    bool unsafe_allow_all = false;
    Clock clock = system_now;

    static RuntimeOptions from(const ServiceConfig& cfg);
};

/// 16 random bytes, hex.
std::string new_correlation_id();

class Runtime final : private Router {
public:
    Runtime(store::HealthStore& store, RuntimeOptions options);
    ~Runtime() override;

    Runtime(const Runtime&) = delete;
    Runtime& operator=(const Runtime&) = delete;

    void start();
    void stop();

    const RuntimeOptions& options() const noexcept { return options_; }

    // An empty correlation id is replaced by a fresh one.
    std::future<RegisterOutcome> register_user(std::string username, std::string password,
                                               policy::Role role, bool allow_admin = false,
                                               std::string correlation_id = {});
    std::future<LoginOutcome> login(std::string username, std::string password,
                                    std::string correlation_id = {});
    std::future<AccessOutcome> read_record(std::string token, std::string file_id,
                                           policy::FieldSet fields = policy::FieldSet::wildcard(),
                                           std::string correlation_id = {});
    std::future<AccessOutcome> write_record(std::string token, std::string file_id,
                                            std::map<policy::FieldId, policy::FieldValue> values,
                                            std::string correlation_id = {});
    std::future<RevokeOutcome> revoke(std::string token, std::string correlation_id = {});
    std::future<SweepOutcome> sweep(std::optional<double> now = std::nullopt,
                                    std::string correlation_id = {});
    std::future<CheckOutcome> check_session(std::string token,
                                            std::optional<double> now = std::nullopt);
    std::future<AuditOutcome> read_audit(std::string token, std::uint64_t from,
                                         std::string correlation_id = {});

    const Agent& agent(AgentKind kind) const;

private:
    void send(AgentKind to, AgentMessage msg) override;
    template <typename T, typename P>
    std::future<T> ingress(std::string correlation_id, P payload);
    void sweep_loop();

    store::HealthStore& store_;
    RuntimeOptions options_;
    DelayQueue delays_;
    std::unique_ptr<UserInterfaceAgent> ui_;
    std::unique_ptr<AuthenticationAgent> auth_;
    std::unique_ptr<ConnectionEstablishmentAgent> establish_;
    std::unique_ptr<ConnectionManagementAgent> manage_;

    std::mutex sweep_mutex_;
    std::condition_variable sweep_cv_;
    bool running_ = false;
    std::thread sweeper_;
};

} // namespace ehrgate::agents
