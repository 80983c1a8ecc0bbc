/**
 * @file scenarios.cpp
 * @brief Attack scripts and the oracle-relative breach judge
 */

#include "ehrgate/harness/harness.hpp"

#include "ehrgate/common/config.hpp"
#include "ehrgate/policy/oracle.hpp"
#include "ehrgate/store/json_codec.hpp"

#include <httplib.h>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <random>
#include <thread>

namespace ehrgate::harness {

using namespace ehrgate::policy;
using store::json;

std::string_view to_string(ScenarioKind k) noexcept {
    switch (k) {
        case ScenarioKind::credential_stuffing: return "credential_stuffing";
        case ScenarioKind::token_replay: return "token_replay";
        case ScenarioKind::privilege_escalation: return "privilege_escalation";
        case ScenarioKind::field_exfiltration: return "field_exfiltration";
        case ScenarioKind::session_hijack: return "session_hijack";
        case ScenarioKind::expired_session_reuse: return "expired_session_reuse";
    }
    return "unknown";
}

std::optional<ScenarioKind> parse_scenario(std::string_view text) noexcept {
    for (auto k : all_scenarios) {
        if (to_string(k) == text) return k;
    }
    return std::nullopt;
}

bool detects_weakening(ScenarioKind k) noexcept {
    return k == ScenarioKind::privilege_escalation || k == ScenarioKind::field_exfiltration;
}

Target Target::parse(const std::string& address) {
    auto colon = address.rfind(':');
    if (colon == std::string::npos || colon == 0) throw fixture_error("target must be host:port, got '" + address + "'");
    Target t;
    t.host = address.substr(0, colon);
    auto digits = std::string_view(address).substr(colon + 1);
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), t.port);
    if (ec != std::errc{} || ptr != digits.data() + digits.size() || t.port <= 0 || t.port > 65535) {
        throw fixture_error("bad port in target '" + address + "'");
    }
    return t;
}

std::map<int, std::size_t> ScenarioReport::status_counts() const {
    std::map<int, std::size_t> out;
    for (const auto& e : transcript) ++out[e.status];
    return out;
}

std::size_t Summary::total_attempts() const {
    std::size_t n = 0;
    for (const auto& r : reports) n += r.attempts;
    return n;
}

std::size_t Summary::total_successes() const {
    std::size_t n = 0;
    for (const auto& r : reports) n += r.successes;
    return n;
}

bool Summary::passed() const {
    for (const auto& r : reports) {
        if (!r.weakened && r.successes != 0) return false;
        if (r.weakened && detects_weakening(r.scenario.kind) && r.successes == 0) return false;
    }
    return true;
}

namespace {

struct Response {
    int status = 0; ///< 0 when the request never got an answer
    std::string body;
};

/// Thin HTTP client; one per thread.
class Probe {
public:
    explicit Probe(const Target& t) : client_(t.host, t.port) {
        client_.set_connection_timeout(5, 0);
        client_.set_read_timeout(30, 0);
        client_.set_keep_alive(false);
    }

    Response get(const std::string& path, const httplib::Headers& headers = {}) {
        return wrap(client_.Get(path, headers));
    }
    Response post(const std::string& path, const json& body, const httplib::Headers& headers = {}) {
        return wrap(client_.Post(path, headers, body.dump(), "application/json"));
    }
    Response put(const std::string& path, const json& body, const httplib::Headers& headers = {}) {
        return wrap(client_.Put(path, headers, body.dump(), "application/json"));
    }

private:
    static Response wrap(const httplib::Result& r) {
        if (!r) return {};
        return {r->status, r->body};
    }
    httplib::Client client_;
};

httplib::Headers bearer(const std::string& token) { return {{"Authorization", "Bearer " + token}}; }

std::string fields_query(const FieldSet& fs) {
    if (fs.is_wildcard()) return "";
    std::string q = "?fields=";
    bool first = true;
    for (auto f : fs.fields()) {
        if (!first) q += ',';
        q += to_string(f);
        first = false;
    }
    return q;
}

std::string random_word(std::mt19937_64& rng, std::size_t n) {
    static constexpr std::string_view alphabet = "abcdefghijklmnopqrstuvwxyz0123456789";
    std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
    std::string out;
    for (std::size_t i = 0; i < n; ++i) out += alphabet[pick(rng)];
    return out;
}

std::string random_hex(std::mt19937_64& rng, std::size_t n) {
    static constexpr std::string_view digits = "0123456789abcdef";
    std::uniform_int_distribution<std::size_t> pick(0, 15);
    std::string out;
    for (std::size_t i = 0; i < n; ++i) out += digits[pick(rng)];
    return out;
}

FieldSet random_nonempty_subset(std::mt19937_64& rng) {
    std::uniform_int_distribution<unsigned> pick(1, (1u << field_count) - 1);
    return FieldSet::from_bits(std::bitset<field_count>(pick(rng)));
}

/**
 * @brief Decides whether a response exposed or changed data the policy
 * forbids for the attacker's actual identity.
 */
class Judge {
public:
    explicit Judge(const Fixture& fx) : fx_(fx) {
        for (const auto& r : fx.records) {
            for (const auto& [field, value] : r.values) secrets_.push_back(policy::to_string(value));
        }
    }

    bool leaks(const std::string& body) const {
        return std::any_of(secrets_.begin(), secrets_.end(),
                           [&](const std::string& s) { return !s.empty() && body.find(s) != std::string::npos; });
    }

    bool read_breach(const std::optional<User>& identity, const std::string& file_id,
                     const FieldSet& requested, const Response& res) const {
        if (res.status != 200) return leaks(res.body);
        if (!identity) return true;
        auto body = json::parse(res.body, nullptr, false);
        if (body.is_discarded() || !body.contains("values") || !body["values"].is_object()) return true;
        FieldSet returned;
        for (const auto& [key, value] : body["values"].items()) {
            auto f = parse_field(key);
            if (!f) return true;
            returned.insert(*f);
        }
        auto decision = oracle_evaluate({identity->user_id, AccessMode::read, file_id, requested},
                                        *identity, fx_.tuples);
        if (!decision.granted()) return true;
        return !returned.is_subset_of(decision.granted_fields);
    }

    bool write_breach(const std::optional<User>& identity, const std::string& file_id,
                      const FieldSet& written, const Response& res) const {
        if (res.status != 200) return leaks(res.body);
        if (!identity) return true;
        auto decision = oracle_evaluate({identity->user_id, AccessMode::write, file_id, written},
                                        *identity, fx_.tuples);
        return !decision.granted() || !written.is_subset_of(decision.granted_fields);
    }

    /// Any success by someone holding no valid identity.
    bool anonymous_breach(const Response& res) const { return res.status == 200 || leaks(res.body); }

private:
    const Fixture& fx_;
    std::vector<std::string> secrets_;
};

struct LoginInfo {
    std::string token;
    double expires_at = 0;
};

class Run {
public:
    Run(const Fixture& fx, const Scenario& sc, const Target& target, ScenarioReport& report)
        : fx_(fx), target_(target), report_(report), judge_(fx), probe_(target) {
        params_ = fx.config;
        for (const auto& [k, v] : sc.parameters) params_[k] = v;
        std::uint64_t seed = u64("seed", 1);
        rng_.seed(seed * 1000003ULL + static_cast<std::uint64_t>(sc.kind));
    }

    void execute(ScenarioKind kind) {
        switch (kind) {
            case ScenarioKind::credential_stuffing: credential_stuffing(); break;
            case ScenarioKind::token_replay: token_replay(); break;
            case ScenarioKind::privilege_escalation: privilege_escalation(); break;
            case ScenarioKind::field_exfiltration: field_exfiltration(); break;
            case ScenarioKind::session_hijack: session_hijack(); break;
            case ScenarioKind::expired_session_reuse: expired_session_reuse(); break;
        }
    }

private:
    std::string str(const std::string& key, const std::string& fallback) const {
        auto it = params_.find(key);
        return it == params_.end() ? fallback : it->second;
    }

    std::uint64_t u64(const std::string& key, std::uint64_t fallback) const {
        auto it = params_.find(key);
        if (it == params_.end()) return fallback;
        std::uint64_t v = 0;
        auto [ptr, ec] = std::from_chars(it->second.data(), it->second.data() + it->second.size(), v);
        if (ec != std::errc{} || ptr != it->second.data() + it->second.size()) {
            throw fixture_error("parameter " + key + " must be an unsigned integer");
        }
        return v;
    }

    void record(std::string request, const Response& res, bool breach) {
        ++report_.attempts;
        if (breach) ++report_.successes;
        report_.transcript.push_back({std::move(request), res.status, breach});
    }

    /// Legitimate login; failure means the fixture and target disagree.
    LoginInfo login_as(const std::string& username) {
        auto res = probe_.post("/api/login", {{"username", username}, {"password", fx_.password(username)}});
        auto body = json::parse(res.body, nullptr, false);
        if (res.status != 200 || body.is_discarded() || !body.contains("token")) {
            throw fixture_error("fixture user '" + username + "' cannot log in (HTTP " +
                                std::to_string(res.status) + ")");
        }
        return {body["token"].get<std::string>(), body["expires_at"].get<double>()};
    }

    void read_attempt(const std::string& who, const std::optional<User>& identity, const std::string& token,
                      const std::string& file_id, const FieldSet& requested) {
        auto path = "/api/records/" + file_id + fields_query(requested);
        auto res = probe_.get(path, bearer(token));
        record("GET " + path + " as " + who, res, judge_.read_breach(identity, file_id, requested, res));
    }

    void credential_stuffing() {
        const auto victim = str("stuffing_target", "dr_a");
        const auto attempts = u64("stuffing_attempts", 500);
        const auto concurrency = std::clamp<std::uint64_t>(u64("stuffing_concurrency", 16), 1, 16);
        const auto real = fx_.passwords.count(victim) ? fx_.password(victim) : std::string{};

        std::vector<std::string> guesses;
        for (std::uint64_t i = 0; i < attempts; ++i) {
            auto g = random_word(rng_, 12);
            if (g == real) g += "x";
            guesses.push_back(std::move(g));
        }
        std::vector<Response> results(guesses.size());
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> workers;
        for (std::uint64_t w = 0; w < concurrency; ++w) {
            workers.emplace_back([&] {
                Probe p(target_);
                for (std::size_t i = next++; i < guesses.size(); i = next++) {
                    results[i] = p.post("/api/login", {{"username", victim}, {"password", guesses[i]}});
                }
            });
        }
        for (auto& t : workers) t.join();
        for (std::size_t i = 0; i < results.size(); ++i) {
            record("POST /api/login user=" + victim + " guess#" + std::to_string(i), results[i],
                   judge_.anonymous_breach(results[i]));
        }
    }

    void token_replay() {
        const auto victim_name = str("replay_victim", "dr_a");
        const auto attempts = u64("replay_attempts", 20);
        const auto victim = fx_.user(victim_name);
        auto session = login_as(victim_name);

        // Use the token once, within the victim's grant, before it is revoked.
        for (const auto& rec : fx_.records) {
            auto grant = oracle_evaluate({victim.user_id, AccessMode::read, rec.file_id, FieldSet::wildcard()},
                                         victim, fx_.tuples);
            if (!grant.granted()) continue;
            read_attempt(victim_name, victim, session.token, rec.file_id, FieldSet::from_bits(grant.granted_fields.bits()));
            break;
        }
        auto out = probe_.post("/api/logout", json::object(), bearer(session.token));
        record("POST /api/logout as " + victim_name, out, false);

        for (std::uint64_t i = 0; i < attempts; ++i) {
            const auto& rec = fx_.records[i % fx_.records.size()];
            Response res;
            std::string what;
            switch (i % 3) {
                case 0:
                    what = "GET /api/records/" + rec.file_id;
                    res = probe_.get("/api/records/" + rec.file_id, bearer(session.token));
                    break;
                case 1:
                    what = "PUT /api/records/" + rec.file_id;
                    res = probe_.put("/api/records/" + rec.file_id,
                                     {{"values", {{"heart_rate", "REPLAY-" + std::to_string(i)}}}},
                                     bearer(session.token));
                    break;
                default:
                    what = "GET /api/audit";
                    res = probe_.get("/api/audit", bearer(session.token));
                    break;
            }
            record(what + " with revoked token of " + victim_name, res, judge_.anonymous_breach(res));
        }
    }

    void privilege_escalation() {
        const auto name = str("escalation_user", "pat_a");
        const auto me = fx_.user(name);
        auto session = login_as(name);

        for (const auto& rec : fx_.records) {
            read_attempt(name, me, session.token, rec.file_id, FieldSet::wildcard());
            for (auto f : all_fields) read_attempt(name, me, session.token, rec.file_id, FieldSet{f});
        }

        auto audit = probe_.get("/api/audit", bearer(session.token));
        record("GET /api/audit as " + name, audit, audit.status == 200 && me.role != Role::admin);

        for (const auto& rec : fx_.records) {
            for (auto f : all_fields) {
                auto path = "/api/records/" + rec.file_id;
                auto value = "ESC-" + random_word(rng_, 6);
                auto res = probe_.put(path, {{"values", {{std::string(to_string(f)), value}}}}, bearer(session.token));
                record("PUT " + path + " field=" + std::string(to_string(f)) + " as " + name, res,
                       judge_.write_breach(me, rec.file_id, FieldSet{f}, res));
            }
        }

        auto reg = probe_.post("/api/register", {{"username", "esc_" + random_word(rng_, 8)},
                                                  {"password", random_word(rng_, 12)},
                                                  {"role", "admin"}});
        record("POST /api/register role=admin", reg, reg.status == 201);
    }

    void field_exfiltration() {
        const auto name = str("exfiltration_user", "dr_a");
        const auto rounds = u64("exfiltration_rounds", 25);
        const auto me = fx_.user(name);
        auto session = login_as(name);

        FieldSet everything;
        for (auto f : all_fields) everything.insert(f);
        for (std::uint64_t i = 0; i < rounds; ++i) {
            const auto& rec = fx_.records[i % fx_.records.size()];
            read_attempt(name, me, session.token, "rec1", everything);
            read_attempt(name, me, session.token, rec.file_id, FieldSet::wildcard());
            read_attempt(name, me, session.token, rec.file_id, random_nonempty_subset(rng_));
        }
    }

    void session_hijack() {
        const auto victim = str("hijack_victim", "dr_b");
        const auto attempts = u64("hijack_attempts", 200);
        auto session = login_as(victim);
        const auto& token = session.token;
        const std::string path = "/api/records/rec2";

        for (std::uint64_t i = 0; i < attempts; ++i) {
            httplib::Headers headers;
            std::string target_path = path;
            std::string variant;
            switch (i % 8) {
                case 0: {
                    auto forged = token;
                    std::uniform_int_distribution<std::size_t> pos(0, forged.size() - 1);
                    auto p = pos(rng_);
                    forged[p] = forged[p] == '0' ? '1' : '0';
                    headers = bearer(forged);
                    variant = "one-char mutation";
                    break;
                }
                case 1: headers = bearer(random_hex(rng_, 64)); variant = "random token"; break;
                case 2: headers = bearer(token.substr(0, token.size() - 1)); variant = "truncated"; break;
                case 3: headers = bearer(token + "0"); variant = "extended"; break;
                case 4: {
                    auto upper = token;
                    for (auto& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
                    headers = bearer(upper);
                    variant = "uppercased";
                    break;
                }
                case 5: headers = bearer(" " + token); variant = "padded"; break;
                case 6: target_path = path + "?token=" + token; variant = "token in query"; break;
                default: headers = {{"Authorization", "Basic " + token}}; variant = "wrong scheme"; break;
            }
            auto res = probe_.get(target_path, headers);
            record("GET " + path + " hijack " + variant + " of " + victim, res, judge_.anonymous_breach(res));
        }
    }

    void expired_session_reuse() {
        const auto name = str("expiry_user", "dr_a");
        const auto attempts = u64("expiry_attempts", 10);
        const auto max_wait = static_cast<double>(u64("expiry_max_wait_seconds", 10));
        auto session = login_as(name);

        double wait = session.expires_at - ehrgate::system_now() + 1.0;
        if (wait > max_wait) {
            throw fixture_error("target session lifetime is too long for expired_session_reuse (" +
                                std::to_string(wait) + " s > " + std::to_string(max_wait) + " s)");
        }
        if (wait > 0) std::this_thread::sleep_for(std::chrono::duration<double>(wait));

        for (std::uint64_t i = 0; i < attempts; ++i) {
            auto path = "/api/records/rec1?fields=heart_rate";
            auto res = probe_.get(path, bearer(session.token));
            record("GET " + std::string(path) + " with expired token of " + name, res, judge_.anonymous_breach(res));
        }
    }

    const Fixture& fx_;
    Target target_;
    ScenarioReport& report_;
    Judge judge_;
    Probe probe_;
    std::map<std::string, std::string> params_;
    std::mt19937_64 rng_;
};

std::optional<std::string> admin_token(Probe& probe, const Fixture& fx) {
    auto admin = fx.param("admin_user", "admin");
    if (!fx.passwords.count(admin)) return std::nullopt;
    auto res = probe.post("/api/login", {{"username", admin}, {"password", fx.password(admin)}});
    auto body = json::parse(res.body, nullptr, false);
    if (res.status != 200 || body.is_discarded()) return std::nullopt;
    return body["token"].get<std::string>();
}

std::vector<store::AuditEvent> audit_since(Probe& probe, const std::string& token, std::uint64_t from) {
    auto res = probe.get("/api/audit?from=" + std::to_string(from), bearer(token));
    std::vector<store::AuditEvent> out;
    auto body = json::parse(res.body, nullptr, false);
    if (res.status != 200 || !body.is_array()) return out;
    for (const auto& j : body) out.push_back(store::audit_from_json(j));
    return out;
}

/// Puts back any record value that differs from the fixture.
void restore_records(Probe& probe, const Fixture& fx) {
    auto name = fx.param("restore_user", "officer");
    if (!fx.passwords.count(name)) return;
    auto res = probe.post("/api/login", {{"username", name}, {"password", fx.password(name)}});
    auto body = json::parse(res.body, nullptr, false);
    if (res.status != 200 || body.is_discarded()) throw fixture_error("restore user cannot log in");
    auto token = body["token"].get<std::string>();
    for (const auto& rec : fx.records) {
        auto cur = probe.get("/api/records/" + rec.file_id, bearer(token));
        auto current = json::parse(cur.body, nullptr, false);
        auto expected = store::values_to_json(rec.values);
        if (cur.status == 200 && !current.is_discarded() && current["values"] == expected) continue;
        auto put = probe.put("/api/records/" + rec.file_id, {{"values", expected}}, bearer(token));
        if (put.status != 200) throw fixture_error("cannot restore " + rec.file_id);
    }
    probe.post("/api/logout", json::object(), bearer(token));
}

} // namespace

Harness::Harness(Fixture fixture) : fixture_(std::move(fixture)) {}

ScenarioReport Harness::run_scenario(const Scenario& scenario, const Target& target) {
    ScenarioReport report;
    report.scenario = scenario;
    report.target = target.str();

    Probe probe(target);
    if (probe.get("/api/health").status != 200) {
        throw target_unreachable("target " + target.str() + " is not healthy");
    }
    auto admin = admin_token(probe, fixture_);
    std::uint64_t audit_from = 1;
    if (admin) {
        auto before = audit_since(probe, *admin, 1);
        audit_from = before.empty() ? 1 : before.back().sequence + 1;
    }

    Run(fixture_, scenario, target, report).execute(scenario.kind);

    restore_records(probe, fixture_);
    if (admin) report.audit_delta = audit_since(probe, *admin, audit_from);
    return report;
}

ScenarioReport Harness::run_weakened_baseline(const Scenario& scenario, const Target& weakened) {
    auto report = run_scenario(scenario, weakened);
    report.weakened = true;
    return report;
}

Summary Harness::run_all(std::uint64_t seed, const Targets& targets) {
    Summary summary;
    summary.seed = seed;
    auto make = [&](ScenarioKind k) {
        Scenario s{k, {{"seed", std::to_string(seed)}}};
        return s;
    };
    for (auto k : all_scenarios) {
        const Target& t = (k == ScenarioKind::expired_session_reuse && targets.short_ttl) ? *targets.short_ttl
                                                                                          : targets.primary;
        summary.reports.push_back(run_scenario(make(k), t));
    }
    if (targets.weakened) {
        for (auto k : all_scenarios) {
            if (detects_weakening(k)) summary.reports.push_back(run_weakened_baseline(make(k), *targets.weakened));
        }
    }
    return summary;
}

} // namespace ehrgate::harness
