/**
 * @file runtime.cpp
 */

#include "ehrgate/agents/runtime.hpp"

#include "ehrgate/crypto/crypto.hpp"

namespace ehrgate::agents {

RuntimeOptions RuntimeOptions::from(const ServiceConfig& cfg) {
    RuntimeOptions o;
    o.session_ttl_seconds = cfg.session_ttl_seconds;
    o.auth_fail_delay = std::chrono::milliseconds(cfg.auth_fail_delay_ms);
    o.sweep_interval_seconds = cfg.sweep_interval_seconds;
    o.queue_bound = cfg.queue_bound;
    o.unsafe_allow_all = cfg.unsafe_allow_all;
    return o;
}

std::string new_correlation_id() { return crypto::to_hex(crypto::random_bytes(16)); }

Runtime::Runtime(store::HealthStore& store, RuntimeOptions options)
    : store_(store), options_(std::move(options)) {
    const auto bound = options_.queue_bound;
    Router& router = *this;
    ui_ = std::make_unique<UserInterfaceAgent>(router, delays_, bound);
    auth_ = std::make_unique<AuthenticationAgent>(
        router, store_, AuthenticationOptions{options_.auth_fail_delay, options_.unsafe_allow_all}, bound);
    establish_ = std::make_unique<ConnectionEstablishmentAgent>(
        router, store_, options_.session_ttl_seconds, options_.auth_fail_delay, options_.clock, bound);
    manage_ = std::make_unique<ConnectionManagementAgent>(router, store_, options_.clock, bound);
}

Runtime::~Runtime() { stop(); }

void Runtime::start() {
    {
        std::lock_guard lock(sweep_mutex_);
        if (running_) return;
        running_ = true;
    }
    manage_->start();
    establish_->start();
    auth_->start();
    ui_->start();
    if (options_.sweep_interval_seconds > 0) sweeper_ = std::thread([this] { sweep_loop(); });
}

void Runtime::stop() {
    {
        std::lock_guard lock(sweep_mutex_);
        running_ = false;
    }
    sweep_cv_.notify_all();
    if (sweeper_.joinable()) sweeper_.join();
    // Upstream first so in-flight work drains toward the reply path.
    ui_->stop();
    auth_->stop();
    establish_->stop();
    manage_->stop();
    delays_.stop();
}

void Runtime::sweep_loop() {
    auto interval = std::chrono::duration<double>(options_.sweep_interval_seconds);
    std::unique_lock lock(sweep_mutex_);
    while (running_) {
        if (sweep_cv_.wait_for(lock, interval, [this] { return !running_; })) break;
        lock.unlock();
        send(AgentKind::connection_management, {new_correlation_id(), ExpireSweep{}});
        lock.lock();
    }
}

const Agent& Runtime::agent(AgentKind kind) const {
    switch (kind) {
        case AgentKind::user_interface: return *ui_;
        case AgentKind::authentication: return *auth_;
        case AgentKind::connection_establishment: return *establish_;
        case AgentKind::connection_management: return *manage_;
    }
    return *ui_;
}

void Runtime::send(AgentKind to, AgentMessage msg) {
    Agent* target = nullptr;
    switch (to) {
        case AgentKind::user_interface: target = ui_.get(); break;
        case AgentKind::authentication: target = auth_.get(); break;
        case AgentKind::connection_establishment: target = establish_.get(); break;
        case AgentKind::connection_management: target = manage_.get(); break;
    }
    if (!target->post(msg)) reject(msg, Status::overloaded, "agent unavailable");
}

template <typename T, typename P>
std::future<T> Runtime::ingress(std::string correlation_id, P payload) {
    auto slot = std::make_shared<std::promise<T>>();
    auto fut = slot->get_future();
    payload.reply = slot;
    if (correlation_id.empty()) correlation_id = new_correlation_id();
    send(AgentKind::user_interface, {std::move(correlation_id), std::move(payload)});
    return fut;
}

std::future<RegisterOutcome> Runtime::register_user(std::string username, std::string password,
                                                    policy::Role role, bool allow_admin,
                                                    std::string correlation_id) {
    return ingress<RegisterOutcome>(std::move(correlation_id),
                                    RegisterUser{std::move(username), std::move(password), role, allow_admin, {}});
}

std::future<LoginOutcome> Runtime::login(std::string username, std::string password,
                                         std::string correlation_id) {
    return ingress<LoginOutcome>(std::move(correlation_id),
                                 LoginRequest{std::move(username), std::move(password), {}});
}

std::future<AccessOutcome> Runtime::read_record(std::string token, std::string file_id,
                                                policy::FieldSet fields, std::string correlation_id) {
    AccessRequestMsg m;
    m.token = std::move(token);
    m.mode = policy::AccessMode::read;
    m.file_id = std::move(file_id);
    m.requested = fields;
    return ingress<AccessOutcome>(std::move(correlation_id), std::move(m));
}

std::future<AccessOutcome> Runtime::write_record(std::string token, std::string file_id,
                                                 std::map<policy::FieldId, policy::FieldValue> values,
                                                 std::string correlation_id) {
    AccessRequestMsg m;
    m.token = std::move(token);
    m.mode = policy::AccessMode::write;
    m.file_id = std::move(file_id);
    m.requested = policy::FieldSet::none();
    for (const auto& [field, value] : values) m.requested.insert(field);
    m.write_values = std::move(values);
    return ingress<AccessOutcome>(std::move(correlation_id), std::move(m));
}

std::future<RevokeOutcome> Runtime::revoke(std::string token, std::string correlation_id) {
    return ingress<RevokeOutcome>(std::move(correlation_id), RevokeSession{std::move(token), {}});
}

std::future<SweepOutcome> Runtime::sweep(std::optional<double> now, std::string correlation_id) {
    return ingress<SweepOutcome>(std::move(correlation_id), ExpireSweep{now, {}});
}

std::future<CheckOutcome> Runtime::check_session(std::string token, std::optional<double> now) {
    return ingress<CheckOutcome>({}, SessionCheck{std::move(token), now, {}});
}

std::future<AuditOutcome> Runtime::read_audit(std::string token, std::uint64_t from,
                                              std::string correlation_id) {
    return ingress<AuditOutcome>(std::move(correlation_id), AuditQuery{std::move(token), from, std::nullopt, {}});
}

} // namespace ehrgate::agents
