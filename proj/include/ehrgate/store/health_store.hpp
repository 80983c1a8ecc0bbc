/**
 * @file health_store.hpp
 * @brief Persistence for users, credentials, policies, records, sessions
 * and the audit trail
 *
 * Layout of the data directory:
 *
 *     users.ndjson  credentials.ndjson  records.ndjson
 *     sessions.ndjson  audit.ndjson  policy.tbl
 *
 * Every `.ndjson` file is an append-only log, one JSON object per line.
 * For users, records and sessions a later line for the same key supersedes
 * earlier ones. A torn final line left by a crash is dropped on open.
 */

#pragma once

#include "ehrgate/common/config.hpp"
#include "ehrgate/common/session.hpp"
#include "ehrgate/crypto/crypto.hpp"
#include "ehrgate/policy/policy_table.hpp"
#include "ehrgate/policy/types.hpp"
#include "ehrgate/store/audit.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ehrgate::store {

struct CredentialRecord {
    std::string user_id;
    std::vector<std::uint8_t> salt;
    std::vector<std::uint8_t> hash;
    std::string algorithm_tag;
};

struct StoreOptions {
    std::filesystem::path dir;
    crypto::HashScheme scheme;  ///< used for new credentials only
    bool fsync = false;
    Clock clock = system_now;
};

enum class VerifyStatus : std::uint8_t { ok, unknown_user, wrong_password };

struct VerifyResult {
    VerifyStatus status = VerifyStatus::unknown_user;
    std::optional<policy::User> user;

    bool ok() const noexcept { return status == VerifyStatus::ok; }
};

std::string_view to_string(VerifyStatus s) noexcept;

/// Usernames compare case-sensitively after trimming surrounding whitespace.
std::string normalize_username(std::string_view name);

class NdjsonLog;

class HealthStore {
public:
    explicit HealthStore(StoreOptions options);
    ~HealthStore();

    HealthStore(const HealthStore&) = delete;
    HealthStore& operator=(const HealthStore&) = delete;

    const std::filesystem::path& dir() const noexcept { return options_.dir; }

    /**
     * @brief Registers a user with a freshly salted credential and appends a
     * `register` audit event.
     *
     * An empty user_id is replaced by a random one. Throws duplicate_username
     * or validation_error.
     */
    policy::User put_user(policy::User user, std::string_view password,
                          std::string_view correlation_id = "-");

    std::optional<policy::User> find_user(std::string_view username) const;
    std::optional<policy::User> find_user_by_id(std::string_view user_id) const;
    std::vector<policy::User> users() const;

    /// Does the same amount of hashing work whether or not the user exists.
    VerifyResult verify_credentials(std::string_view username, std::string_view password) const;

    /// Upsert. Throws validation_error unless the owner is a registered patient.
    void put_record(const policy::HealthRecord& record);
    std::optional<policy::HealthRecord> get_record(std::string_view file_id) const;
    std::vector<policy::HealthRecord> records() const;

    policy::PolicyTable policy_table() const;
    void put_policy(const policy::PolicyTuple& tuple);
    void replace_policy_table(const policy::PolicyTable& table);

    void put_session(const Session& session);
    /// Sessions not yet purged, ordered by token.
    std::vector<Session> sessions() const;
    /// True if the token was ever issued, purged sessions included.
    bool token_known(std::string_view token) const;
    void purge_sessions(std::span<const std::string> tokens);

    /// Assigns the next sequence number and the current time, persists, and
    /// returns the sequence.
    std::uint64_t append_audit(AuditEvent event);
    /// Events with sequence >= @p from, in order.
    std::vector<AuditEvent> read_audit(std::uint64_t from = 1) const;
    std::uint64_t last_audit_sequence() const;

private:
    void load();

    StoreOptions options_;

    std::unique_ptr<NdjsonLog> users_log_;
    std::unique_ptr<NdjsonLog> credentials_log_;
    std::unique_ptr<NdjsonLog> records_log_;
    std::unique_ptr<NdjsonLog> sessions_log_;
    std::unique_ptr<NdjsonLog> audit_log_;

    mutable std::shared_mutex users_mutex_;
    std::map<std::string, policy::User> users_by_name_;
    std::map<std::string, std::string, std::less<>> name_by_id_;
    std::map<std::string, CredentialRecord, std::less<>> credentials_;

    mutable std::shared_mutex records_mutex_;
    std::map<std::string, policy::HealthRecord, std::less<>> records_;

    mutable std::shared_mutex policy_mutex_;
    policy::PolicyTable policy_;

    mutable std::shared_mutex sessions_mutex_;
    std::map<std::string, Session, std::less<>> sessions_;
    std::set<std::string, std::less<>> issued_tokens_;

    mutable std::shared_mutex audit_mutex_;
    std::vector<AuditEvent> audit_;
};

} // namespace ehrgate::store
