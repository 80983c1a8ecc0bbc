/**
 * @file config.hpp
 * @brief key=value configuration shared by the runtime, gateway and CLI
 */

#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <string_view>

namespace ehrgate {

/// Seconds since the Unix epoch, UTC, with sub-second precision.
using Clock = std::function<double()>;

double system_now();

/**
 * @brief Parses `key=value` lines. `#` starts a comment line; surrounding
 * whitespace is trimmed. Throws parse_error on lines without `=`.
 */
std::map<std::string, std::string> parse_key_values(std::string_view text);
std::map<std::string, std::string> load_key_values(const std::filesystem::path& path);

struct ServiceConfig {
    std::filesystem::path data_dir = "data";
    std::string listen_addr = "127.0.0.1:8080";
    double session_ttl_seconds = 3600;
    unsigned auth_fail_delay_ms = 200;
    double sweep_interval_seconds = 60;
    std::size_t queue_bound = 1024;
    unsigned pbkdf2_iterations = 310000;
    bool store_fsync = false;
    bool unsafe_allow_all = false;

    /// Applies known keys; throws parse_error for unknown keys or bad values.
    void apply(const std::map<std::string, std::string>& kv);
    /// Applies EHRGATE_<KEY> variables, e.g. EHRGATE_SESSION_TTL_SECONDS.
    void apply_environment();

    static ServiceConfig load(const std::filesystem::path& path);

    std::string host() const;
    int port() const;
};

} // namespace ehrgate
