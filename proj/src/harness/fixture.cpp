/**
 * @file fixture.cpp
 */

#include "ehrgate/harness/fixture.hpp"

#include "ehrgate/common/config.hpp"
#include "ehrgate/common/error.hpp"
#include "ehrgate/policy/policy_format.hpp"
#include "ehrgate/store/health_store.hpp"
#include "ehrgate/store/json_codec.hpp"

#include <algorithm>

#include <charconv>
#include <fstream>
#include <random>
#include <sstream>

namespace ehrgate::harness {

using namespace ehrgate::policy;

namespace {

std::string random_word(std::mt19937_64& rng, std::size_t n) {
    static constexpr std::string_view alphabet =
        "abcdefghijkmnopqrstuvwxyzABCDEFGHJKLMNPQRSTUVWXYZ23456789";
    std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
    std::string out;
    for (std::size_t i = 0; i < n; ++i) out += alphabet[pick(rng)];
    return out;
}

constexpr std::string_view default_policy = R"(# default harness fixture
patient,read,rec1,age|blood_group|heart_rate
patient,read,rec2,age|blood_group
physician,read,rec1,heart_rate
physician,read,rec2,heart_rate|blood_pressure|sugar_level
physician,write,rec1,heart_rate
records_officer,read,rec1,*
records_officer,read,rec2,*
records_officer,write,rec1,*
records_officer,write,rec2,*
admin,read,rec1,location
)";

/// Complete lines only; the fixture is never written to while loading.
std::vector<store::json> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw fixture_error("fixture is missing " + path.filename().string());
    std::vector<store::json> out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) out.push_back(store::json::parse(line));
    }
    return out;
}

} // namespace

Fixture Fixture::load(const std::filesystem::path& dir) {
    Fixture f;
    f.dir = dir;
    try {
        for (auto& [key, value] : load_key_values(dir / "scenario.cfg")) {
            if (key.rfind("password.", 0) == 0) {
                f.passwords[key.substr(9)] = value;
            } else {
                f.config[key] = value;
            }
        }
        std::ifstream policy_in(dir / "policy.tbl", std::ios::binary);
        if (!policy_in) throw fixture_error("fixture has no policy.tbl");
        std::ostringstream buf;
        buf << policy_in.rdbuf();
        f.tuples = parse_policy_tuples(buf.str());

        std::map<std::string, User> users;
        for (const auto& j : read_lines(dir / "users.ndjson")) {
            auto u = store::user_from_json(j);
            users[u.username] = u;
        }
        for (auto& [name, u] : users) f.users.push_back(std::move(u));
        std::map<std::string, HealthRecord> records;
        for (const auto& j : read_lines(dir / "records.ndjson")) {
            auto r = store::record_from_json(j);
            records[r.file_id] = r;
        }
        for (auto& [id, r] : records) f.records.push_back(std::move(r));
    } catch (const store::json::exception& e) {
        throw fixture_error(std::string("cannot load fixture: ") + e.what());
    } catch (const ehrgate::error& e) {
        throw fixture_error(std::string("cannot load fixture: ") + e.what());
    }
    for (const auto& [name, pw] : f.passwords) {
        if (std::none_of(f.users.begin(), f.users.end(), [&](const User& u) { return u.username == name; })) {
            throw fixture_error("scenario.cfg has a password for unknown user '" + name + "'");
        }
    }
    return f;
}

const User& Fixture::user(const std::string& username) const {
    for (const auto& u : users) {
        if (u.username == username) return u;
    }
    throw fixture_error("fixture has no user '" + username + "'");
}

const std::string& Fixture::password(const std::string& username) const {
    auto it = passwords.find(username);
    if (it == passwords.end()) throw fixture_error("scenario.cfg has no password for '" + username + "'");
    return it->second;
}

std::string Fixture::param(const std::string& key, const std::string& fallback) const {
    auto it = config.find(key);
    return it == config.end() ? fallback : it->second;
}

std::uint64_t Fixture::param_u64(const std::string& key, std::uint64_t fallback) const {
    auto it = config.find(key);
    if (it == config.end()) return fallback;
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(it->second.data(), it->second.data() + it->second.size(), v);
    if (ec != std::errc{} || ptr != it->second.data() + it->second.size()) {
        throw fixture_error("scenario.cfg: " + key + " must be an unsigned integer");
    }
    return v;
}

void write_default_fixture(const std::filesystem::path& dir, std::uint64_t seed, unsigned pbkdf2_iterations) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    for (auto name : {"users.ndjson", "credentials.ndjson", "records.ndjson", "sessions.ndjson",
                      "audit.ndjson", "policy.tbl", "scenario.cfg"}) {
        std::filesystem::remove(dir / name, ec);
    }

    std::mt19937_64 rng(seed);
    store::StoreOptions so;
    so.dir = dir;
    so.scheme.iterations = pbkdf2_iterations;
    store::HealthStore st(so);

    const std::vector<std::pair<std::string, Role>> people = {
        {"pat_a", Role::patient},   {"pat_b", Role::patient},
        {"dr_a", Role::physician},  {"dr_b", Role::physician},
        {"officer", Role::records_officer}, {"admin", Role::admin},
    };
    std::ostringstream cfg;
    cfg << "# threat-harness scenario parameters\n"
        << "seed=" << seed << "\n"
        << "stuffing_target=dr_a\n"
        << "stuffing_attempts=500\n"
        << "stuffing_concurrency=16\n"
        << "replay_victim=dr_a\n"
        << "replay_attempts=20\n"
        << "escalation_user=pat_a\n"
        << "exfiltration_user=dr_a\n"
        << "exfiltration_rounds=25\n"
        << "hijack_victim=dr_b\n"
        << "hijack_attempts=200\n"
        << "expiry_user=dr_a\n"
        << "expiry_attempts=10\n"
        << "expiry_max_wait_seconds=10\n"
        << "restore_user=officer\n"
        << "admin_user=admin\n";

    std::map<std::string, std::string> ids;
    for (const auto& [name, role] : people) {
        auto pw = random_word(rng, 16);
        User u;
        u.user_id = "u-" + name;
        u.username = name;
        u.role = role;
        ids[name] = st.put_user(u, pw, "fixture").user_id;
        cfg << "password." << name << "=" << pw << "\n";
    }

    const std::vector<std::pair<std::string, std::string>> recs = {{"rec1", "pat_a"}, {"rec2", "pat_b"}};
    for (const auto& [file_id, owner] : recs) {
        HealthRecord r{file_id, ids[owner], {}};
        for (auto field : all_fields) {
            r.values[field] = "V-" + file_id + "-" + std::string(to_string(field)) + "-" + random_word(rng, 6);
        }
        st.put_record(r);
    }
    st.replace_policy_table(parse_policy_table(default_policy));

    std::ofstream out(dir / "scenario.cfg", std::ios::binary | std::ios::trunc);
    out << cfg.str();
    if (!out) throw fixture_error("cannot write scenario.cfg");
}

void seed_data_dir(const std::filesystem::path& fixture_dir, const std::filesystem::path& data_dir) {
    std::error_code ec;
    std::filesystem::create_directories(data_dir, ec);
    if (ec) throw fixture_error("cannot create " + data_dir.string() + ": " + ec.message());
    for (auto name : {"users.ndjson", "credentials.ndjson", "records.ndjson", "policy.tbl"}) {
        auto src = fixture_dir / name;
        if (!std::filesystem::exists(src)) throw fixture_error("fixture is missing " + std::string(name));
        std::filesystem::copy_file(src, data_dir / name, std::filesystem::copy_options::overwrite_existing, ec);
        if (ec) throw fixture_error("cannot copy " + src.string() + ": " + ec.message());
    }
}

} // namespace ehrgate::harness
