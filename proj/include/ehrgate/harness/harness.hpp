/**
 * @file harness.hpp
 * @brief Scripted attacks against a live gateway, judged by the oracle
 *
 * A response counts as a breach when its content contradicts what
 * oracle_evaluate() allows the attacker's real identity (or lack of one),
 * never by status code alone.
 */

#pragma once

#include "ehrgate/harness/fixture.hpp"
#include "ehrgate/store/audit.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ehrgate::harness {

enum class ScenarioKind : std::uint8_t {
    credential_stuffing,
    token_replay,
    privilege_escalation,
    field_exfiltration,
    session_hijack,
    expired_session_reuse,
};

inline constexpr std::array<ScenarioKind, 6> all_scenarios = {
    ScenarioKind::credential_stuffing, ScenarioKind::token_replay,
    ScenarioKind::privilege_escalation, ScenarioKind::field_exfiltration,
    ScenarioKind::session_hijack, ScenarioKind::expired_session_reuse,
};

std::string_view to_string(ScenarioKind k) noexcept;
std::optional<ScenarioKind> parse_scenario(std::string_view text) noexcept;

struct Scenario {
    ScenarioKind kind = ScenarioKind::credential_stuffing;
    /// Overrides scenario.cfg entries for this run (attempt counts, seed).
    std::map<std::string, std::string> parameters;
};

class target_unreachable : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Target {
    std::string host = "127.0.0.1";
    int port = 8080;

    /// Throws fixture_error on a malformed address.
    static Target parse(const std::string& address);
    std::string str() const { return host + ":" + std::to_string(port); }
};

struct TranscriptEntry {
    std::string request; ///< method, path and the identity used; no tokens
    int status = 0;
    bool breach = false;

    bool operator==(const TranscriptEntry&) const = default;
};

struct ScenarioReport {
    Scenario scenario;
    std::string target;
    bool weakened = false;
    std::size_t attempts = 0;
    std::size_t successes = 0;
    std::vector<TranscriptEntry> transcript;
    std::vector<store::AuditEvent> audit_delta;

    std::map<int, std::size_t> status_counts() const;
};

struct Targets {
    Target primary;
    /// Gateway with a short session lifetime for expired_session_reuse;
    /// primary is used when absent.
    std::optional<Target> short_ttl;
    /// Gateway started with --unsafe-allow-all; baselines skipped when absent.
    std::optional<Target> weakened;
};

struct Summary {
    std::uint64_t seed = 0;
    std::vector<ScenarioReport> reports;

    std::size_t total_attempts() const;
    std::size_t total_successes() const;
    /// Zero breaches on correct targets, and every weakened baseline that
    /// is expected to breach did.
    bool passed() const;
};

/// True for the scenarios that must detect the allow-all weakening.
bool detects_weakening(ScenarioKind k) noexcept;

class Harness {
public:
    explicit Harness(Fixture fixture);

    /// Health-checks the target (target_unreachable), runs the attack,
    /// then restores fixture records through the restore user.
    ScenarioReport run_scenario(const Scenario& scenario, const Target& target);
    /// Same attack against a gateway whose policy layer allows everything.
    ScenarioReport run_weakened_baseline(const Scenario& scenario, const Target& weakened);
    /// All six scenarios, then the weakened baselines of privilege_escalation
    /// and field_exfiltration when a weakened target is given.
    Summary run_all(std::uint64_t seed, const Targets& targets);

    const Fixture& fixture() const noexcept { return fixture_; }

private:
    Fixture fixture_;
};

std::string format_report_text(const Summary& summary);
/// One JSON object per report line.
std::string format_report_ndjson(const Summary& summary);
/// Writes report.txt and report.ndjson into @p dir.
void write_reports(const Summary& summary, const std::filesystem::path& dir);

} // namespace ehrgate::harness
