/**
 * @file report.cpp
 */

#include "ehrgate/harness/harness.hpp"

#include "ehrgate/store/json_codec.hpp"

#include <cstdio>
#include <fstream>

namespace ehrgate::harness {

std::string format_report_text(const Summary& summary) {
    std::string out = "threat harness summary (seed " + std::to_string(summary.seed) + ")\n";
    char line[256];
    std::snprintf(line, sizeof line, "%-24s %-9s %-22s %9s %9s  %s\n", "scenario", "target", "address",
                  "attempts", "breaches", "statuses");
    out += line;
    for (const auto& r : summary.reports) {
        std::string statuses;
        for (const auto& [status, count] : r.status_counts()) {
            if (!statuses.empty()) statuses += ' ';
            statuses += std::to_string(status) + "x" + std::to_string(count);
        }
        std::snprintf(line, sizeof line, "%-24s %-9s %-22s %9zu %9zu  %s\n",
                      std::string(to_string(r.scenario.kind)).c_str(), r.weakened ? "weakened" : "correct",
                      r.target.c_str(), r.attempts, r.successes, statuses.c_str());
        out += line;
    }
    std::snprintf(line, sizeof line, "%-24s %-9s %-22s %9zu %9zu\n", "total", "", "", summary.total_attempts(),
                  summary.total_successes());
    out += line;
    out += summary.passed() ? "result: PASS\n" : "result: FAIL\n";
    return out;
}

std::string format_report_ndjson(const Summary& summary) {
    std::string out;
    for (const auto& r : summary.reports) {
        store::json statuses = store::json::object();
        for (const auto& [status, count] : r.status_counts()) statuses[std::to_string(status)] = count;
        store::json j = {{"scenario", to_string(r.scenario.kind)},
                         {"seed", summary.seed},
                         {"weakened", r.weakened},
                         {"target", r.target},
                         {"attempts", r.attempts},
                         {"successes", r.successes},
                         {"statuses", statuses},
                         {"audit_delta", r.audit_delta.size()}};
        out += j.dump();
        out += '\n';
    }
    return out;
}

void write_reports(const Summary& summary, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    std::ofstream txt(dir / "report.txt", std::ios::binary | std::ios::trunc);
    txt << format_report_text(summary);
    std::ofstream nd(dir / "report.ndjson", std::ios::binary | std::ios::trunc);
    nd << format_report_ndjson(summary);
    if (!txt || !nd) throw fixture_error("cannot write reports to " + dir.string());
}

} // namespace ehrgate::harness
