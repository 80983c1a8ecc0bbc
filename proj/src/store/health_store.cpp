/**
 * @file health_store.cpp
 */

#include "ehrgate/store/health_store.hpp"

#include "ehrgate/common/error.hpp"
#include "ehrgate/policy/policy_format.hpp"
#include "ehrgate/store/json_codec.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cctype>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <mutex>
#include <sstream>

namespace ehrgate::store {

using namespace ehrgate::policy;

/**
 * @brief One append-only NDJSON file. Each append is a single write(2) of a
 * complete line so a killed process leaves at most one torn line.
 */
class NdjsonLog {
public:
    NdjsonLog(std::filesystem::path path, bool fsync) : path_(std::move(path)), fsync_(fsync) {
        fd_ = ::open(path_.c_str(), O_RDWR | O_CREAT | O_APPEND | O_CLOEXEC, 0600);
        if (fd_ < 0) throw storage_io("cannot open " + path_.string() + ": " + std::strerror(errno));
    }
    ~NdjsonLog() {
        if (fd_ >= 0) ::close(fd_);
    }
    NdjsonLog(const NdjsonLog&) = delete;
    NdjsonLog& operator=(const NdjsonLog&) = delete;

    /// Parses every complete line; truncates a torn tail.
    std::vector<json> read_all() {
        std::ifstream in(path_, std::ios::binary);
        std::ostringstream buf;
        buf << in.rdbuf();
        std::string text = buf.str();

        std::vector<json> out;
        std::size_t start = 0;
        std::size_t good_end = 0;
        std::size_t line_no = 0;
        while (start < text.size()) {
            auto nl = text.find('\n', start);
            ++line_no;
            if (nl == std::string::npos) break;  // no newline: torn tail
            auto line = std::string_view(text).substr(start, nl - start);
            if (!line.empty()) {
                auto j = json::parse(line, nullptr, false);
                if (j.is_discarded()) {
                    if (nl + 1 < text.size()) {
                        throw storage_io(path_.string() + ": corrupt line " + std::to_string(line_no));
                    }
                    break;
                }
                out.push_back(std::move(j));
            }
            start = nl + 1;
            good_end = start;
        }
        if (good_end != text.size()) {
            if (::ftruncate(fd_, static_cast<off_t>(good_end)) != 0) {
                throw storage_io("cannot repair " + path_.string() + ": " + std::strerror(errno));
            }
        }
        return out;
    }

    void append(const json& value) {
        std::string line = value.dump();
        line += '\n';
        const char* p = line.data();
        std::size_t left = line.size();
        while (left > 0) {
            auto n = ::write(fd_, p, left);
            if (n < 0) {
                if (errno == EINTR) continue;
                throw storage_io("write to " + path_.string() + " failed: " + std::strerror(errno));
            }
            p += n;
            left -= static_cast<std::size_t>(n);
        }
        if (fsync_ && ::fsync(fd_) != 0) {
            throw storage_io("fsync " + path_.string() + " failed: " + std::strerror(errno));
        }
    }

private:
    std::filesystem::path path_;
    bool fsync_;
    int fd_ = -1;
};

std::string_view to_string(VerifyStatus s) noexcept {
    switch (s) {
        case VerifyStatus::ok: return "ok";
        case VerifyStatus::unknown_user: return "unknown_user";
        case VerifyStatus::wrong_password: return "wrong_password";
    }
    return "unknown";
}

std::string normalize_username(std::string_view name) {
    while (!name.empty() && std::isspace(static_cast<unsigned char>(name.front()))) name.remove_prefix(1);
    while (!name.empty() && std::isspace(static_cast<unsigned char>(name.back()))) name.remove_suffix(1);
    return std::string(name);
}

HealthStore::HealthStore(StoreOptions options) : options_(std::move(options)) {
    std::error_code ec;
    std::filesystem::create_directories(options_.dir, ec);
    if (ec) throw storage_io("cannot create " + options_.dir.string() + ": " + ec.message());
    users_log_ = std::make_unique<NdjsonLog>(options_.dir / "users.ndjson", options_.fsync);
    credentials_log_ = std::make_unique<NdjsonLog>(options_.dir / "credentials.ndjson", options_.fsync);
    records_log_ = std::make_unique<NdjsonLog>(options_.dir / "records.ndjson", options_.fsync);
    sessions_log_ = std::make_unique<NdjsonLog>(options_.dir / "sessions.ndjson", options_.fsync);
    audit_log_ = std::make_unique<NdjsonLog>(options_.dir / "audit.ndjson", options_.fsync);
    load();
}

HealthStore::~HealthStore() = default;

void HealthStore::load() {
    try {
        for (const auto& j : users_log_->read_all()) {
            auto u = user_from_json(j);
            name_by_id_[u.user_id] = u.username;
            users_by_name_[u.username] = std::move(u);
        }
        for (const auto& j : credentials_log_->read_all()) {
            CredentialRecord c;
            c.user_id = j.at("user_id").get<std::string>();
            c.salt = crypto::from_hex(j.at("salt").get<std::string>());
            c.hash = crypto::from_hex(j.at("hash").get<std::string>());
            c.algorithm_tag = j.at("algorithm_tag").get<std::string>();
            credentials_[c.user_id] = std::move(c);
        }
        for (const auto& j : records_log_->read_all()) {
            auto r = record_from_json(j);
            records_[r.file_id] = std::move(r);
        }
        for (const auto& j : sessions_log_->read_all()) {
            auto token = j.at("token").get<std::string>();
            issued_tokens_.insert(token);
            if (j.value("purged", false)) {
                sessions_.erase(token);
            } else {
                sessions_[token] = session_from_json(j);
            }
        }
        for (const auto& j : audit_log_->read_all()) {
            auto e = audit_from_json(j);
            if (e.sequence != audit_.size() + 1) {
                throw storage_io("audit log has a gap before sequence " + std::to_string(e.sequence));
            }
            audit_.push_back(std::move(e));
        }
    } catch (const json::exception& e) {
        throw storage_io(std::string("malformed store entry: ") + e.what());
    }

    auto policy_path = options_.dir / "policy.tbl";
    if (std::filesystem::exists(policy_path)) policy_ = load_policy_table(policy_path);
}

User HealthStore::put_user(User user, std::string_view password, std::string_view correlation_id) {
    user.username = normalize_username(user.username);
    if (user.username.empty()) throw validation_error("username must not be empty");
    if (password.empty()) throw validation_error("password must not be empty");

    CredentialRecord cred;
    cred.salt = crypto::random_bytes(crypto::salt_size);
    cred.algorithm_tag = options_.scheme.tag();
    cred.hash = crypto::derive_hash(password, cred.salt, options_.scheme);

    {
        std::unique_lock lock(users_mutex_);
        if (users_by_name_.count(user.username) != 0) {
            throw duplicate_username("username '" + user.username + "' is already taken");
        }
        if (user.user_id.empty()) {
            do {
                user.user_id = "u-" + crypto::to_hex(crypto::random_bytes(8));
            } while (name_by_id_.count(user.user_id) != 0);
        } else if (name_by_id_.count(user.user_id) != 0) {
            throw validation_error("user_id '" + user.user_id + "' is already taken");
        }
        user.credential_ref = user.user_id;
        cred.user_id = user.user_id;

        credentials_log_->append({{"user_id", cred.user_id},
                                  {"salt", crypto::to_hex(cred.salt)},
                                  {"hash", crypto::to_hex(cred.hash)},
                                  {"algorithm_tag", cred.algorithm_tag}});
        users_log_->append(to_json(user));
        credentials_[user.user_id] = std::move(cred);
        name_by_id_[user.user_id] = user.username;
        users_by_name_[user.username] = user;
    }

    AuditEvent e;
    e.correlation_id = std::string(correlation_id);
    e.actor_username = user.username;
    e.kind = AuditKind::register_user;
    e.detail = "role=" + std::string(to_string(user.role)) + " user_id=" + user.user_id;
    append_audit(std::move(e));
    return user;
}

std::optional<User> HealthStore::find_user(std::string_view username) const {
    std::shared_lock lock(users_mutex_);
    auto it = users_by_name_.find(normalize_username(username));
    if (it == users_by_name_.end()) return std::nullopt;
    return it->second;
}

std::optional<User> HealthStore::find_user_by_id(std::string_view user_id) const {
    std::shared_lock lock(users_mutex_);
    auto it = name_by_id_.find(user_id);
    if (it == name_by_id_.end()) return std::nullopt;
    return users_by_name_.at(it->second);
}

std::vector<User> HealthStore::users() const {
    std::shared_lock lock(users_mutex_);
    std::vector<User> out;
    out.reserve(users_by_name_.size());
    for (const auto& [name, u] : users_by_name_) out.push_back(u);
    return out;
}

VerifyResult HealthStore::verify_credentials(std::string_view username, std::string_view password) const {
    std::optional<User> user;
    CredentialRecord cred;
    {
        std::shared_lock lock(users_mutex_);
        auto it = users_by_name_.find(normalize_username(username));
        if (it != users_by_name_.end()) {
            user = it->second;
            auto c = credentials_.find(user->user_id);
            if (c != credentials_.end()) cred = c->second;
        }
    }

    if (!user || cred.hash.empty()) {
        // Burn the same work as a real verification.
        static const std::vector<std::uint8_t> dummy_salt(crypto::salt_size, 0x5a);
        (void)crypto::derive_hash(password, dummy_salt, options_.scheme);
        return {VerifyStatus::unknown_user, std::nullopt};
    }

    auto scheme = crypto::HashScheme::from_tag(cred.algorithm_tag);
    auto candidate = crypto::derive_hash(password, cred.salt, scheme);
    if (!crypto::constant_time_equal(candidate, cred.hash)) {
        return {VerifyStatus::wrong_password, std::nullopt};
    }
    return {VerifyStatus::ok, std::move(user)};
}

void HealthStore::put_record(const HealthRecord& record) {
    if (record.file_id.empty()) throw validation_error("file_id must not be empty");
    auto owner = find_user_by_id(record.owner_user_id);
    if (!owner) throw validation_error("record owner '" + record.owner_user_id + "' is not a registered user");
    if (owner->role != Role::patient) {
        throw validation_error("record owner '" + owner->username + "' is not a patient");
    }
    std::unique_lock lock(records_mutex_);
    records_log_->append(to_json(record));
    records_[record.file_id] = record;
}

std::optional<HealthRecord> HealthStore::get_record(std::string_view file_id) const {
    std::shared_lock lock(records_mutex_);
    auto it = records_.find(file_id);
    if (it == records_.end()) return std::nullopt;
    return it->second;
}

std::vector<HealthRecord> HealthStore::records() const {
    std::shared_lock lock(records_mutex_);
    std::vector<HealthRecord> out;
    for (const auto& [id, r] : records_) out.push_back(r);
    return out;
}

PolicyTable HealthStore::policy_table() const {
    std::shared_lock lock(policy_mutex_);
    return policy_;
}

void HealthStore::put_policy(const PolicyTuple& tuple) {
    std::unique_lock lock(policy_mutex_);
    auto next = policy_;
    next.insert(tuple);
    save_policy_table(next, options_.dir / "policy.tbl");
    policy_ = std::move(next);
}

void HealthStore::replace_policy_table(const PolicyTable& table) {
    std::unique_lock lock(policy_mutex_);
    save_policy_table(table, options_.dir / "policy.tbl");
    policy_ = table;
}

void HealthStore::put_session(const Session& session) {
    std::unique_lock lock(sessions_mutex_);
    sessions_log_->append(to_json(session));
    issued_tokens_.insert(session.token);
    sessions_[session.token] = session;
}

std::vector<Session> HealthStore::sessions() const {
    std::shared_lock lock(sessions_mutex_);
    std::vector<Session> out;
    for (const auto& [token, s] : sessions_) out.push_back(s);
    return out;
}

bool HealthStore::token_known(std::string_view token) const {
    std::shared_lock lock(sessions_mutex_);
    return issued_tokens_.count(token) != 0;
}

void HealthStore::purge_sessions(std::span<const std::string> tokens) {
    std::unique_lock lock(sessions_mutex_);
    for (const auto& token : tokens) {
        auto it = sessions_.find(token);
        if (it == sessions_.end()) continue;
        sessions_log_->append({{"token", token}, {"purged", true}});
        sessions_.erase(it);
    }
}

std::uint64_t HealthStore::append_audit(AuditEvent event) {
    std::unique_lock lock(audit_mutex_);
    event.sequence = audit_.size() + 1;
    event.timestamp = options_.clock();
    if (event.correlation_id.empty()) event.correlation_id = "-";
    if (event.actor_username.empty()) event.actor_username = "-";
    audit_log_->append(to_json(event));
    audit_.push_back(std::move(event));
    return audit_.back().sequence;
}

std::vector<AuditEvent> HealthStore::read_audit(std::uint64_t from) const {
    std::shared_lock lock(audit_mutex_);
    if (from == 0) from = 1;
    if (from > audit_.size()) return {};
    return {audit_.begin() + static_cast<std::ptrdiff_t>(from - 1), audit_.end()};
}

std::uint64_t HealthStore::last_audit_sequence() const {
    std::shared_lock lock(audit_mutex_);
    return audit_.size();
}

} // namespace ehrgate::store
