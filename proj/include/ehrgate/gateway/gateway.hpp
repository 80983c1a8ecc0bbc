/**
 * @file gateway.hpp
 * @brief HTTP/JSON facade over the agent runtime
 *
 *     POST /api/register            {username, password, role} -> 201 {user_id}
 *     POST /api/login               {username, password} -> 200 {token, expires_at, role}
 *     GET  /api/records/{file_id}   ?fields=a,b            -> 200 {file_id, values}
 *     PUT  /api/records/{file_id}   {values}               -> 200 {file_id, written}
 *     POST /api/logout                                     -> 204
 *     GET  /api/audit               ?from=n (admin)        -> 200 [events]
 *     GET  /api/health                                     -> 200
 *
 * Errors use `{"code", "message", "correlation_id"}`. Clients may pass
 * `X-Correlation-Id`; it is echoed back and recorded in the audit trail.
 */

#pragma once

#include "ehrgate/agents/runtime.hpp"
#include "ehrgate/common/config.hpp"
#include "ehrgate/store/health_store.hpp"

#include <memory>
#include <string>
#include <thread>

namespace ehrgate::gateway {

struct ApiError {
    int http_status = 500;
    std::string code;
    std::string message;
    std::string correlation_id;

    std::string body() const;
};

/// HTTP status and error code for a non-ok runtime status.
ApiError to_api_error(agents::Status status, std::string message, std::string correlation_id);

/// Accepts 1-64 characters from [A-Za-z0-9._-].
bool valid_correlation_id(std::string_view id) noexcept;

class Gateway {
public:
    explicit Gateway(agents::Runtime& runtime, std::size_t worker_threads = 32);
    ~Gateway();

    Gateway(const Gateway&) = delete;
    Gateway& operator=(const Gateway&) = delete;

    /// Binds and serves on a background thread. Port 0 picks a free port.
    /// Returns the bound port; throws ehrgate::error if binding fails.
    int start(const std::string& host, int port);
    void stop();

    int port() const noexcept { return port_; }

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    int port_ = 0;
    std::thread listener_;
};

/**
 * @brief Store, runtime and gateway assembled from one configuration, as
 * run by `ehrgate serve`.
 */
class Service {
public:
    explicit Service(ServiceConfig config, Clock clock = system_now);
    ~Service();

    int start();
    void stop();

    const ServiceConfig& config() const noexcept { return config_; }
    store::HealthStore& store() noexcept { return *store_; }
    agents::Runtime& runtime() noexcept { return *runtime_; }
    int port() const noexcept { return gateway_->port(); }
    std::string address() const;

private:
    ServiceConfig config_;
    std::unique_ptr<store::HealthStore> store_;
    std::unique_ptr<agents::Runtime> runtime_;
    std::unique_ptr<Gateway> gateway_;
};

} // namespace ehrgate::gateway
