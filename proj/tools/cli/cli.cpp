#include "cli.hpp"

#include "ehrgate/common/error.hpp"
#include "ehrgate/gateway/gateway.hpp"
#include "ehrgate/harness/fixture.hpp"
#include "ehrgate/harness/harness.hpp"
#include "ehrgate/policy/policy_format.hpp"
#include "ehrgate/store/audit.hpp"
#include "ehrgate/store/health_store.hpp"
#include "ehrgate/store/json_codec.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

#include <pthread.h>
#include <termios.h>
#include <unistd.h>

namespace ehrgate::cli {

namespace {

namespace fs = std::filesystem;

class cli_failure : public std::runtime_error {
public:
    cli_failure(int code, const std::string& what) : std::runtime_error(what), code_(code) {}
    int code() const noexcept { return code_; }

private:
    int code_;
};

struct Globals {
    std::string config_path;
    std::string data_dir;
};

ServiceConfig load_config(const Globals& g) {
    ServiceConfig cfg;
    if (!g.config_path.empty()) cfg = ServiceConfig::load(g.config_path);
    cfg.apply_environment();
    if (!g.data_dir.empty()) cfg.data_dir = g.data_dir;
    return cfg;
}

store::StoreOptions store_options(const ServiceConfig& cfg) {
    store::StoreOptions o;
    o.dir = cfg.data_dir;
    o.scheme = crypto::HashScheme{cfg.pbkdf2_iterations};
    o.fsync = cfg.store_fsync;
    return o;
}

/// Reads one line from the terminal with echo off, or from stdin when
/// there is no terminal.
std::string prompt_password(std::ostream& err) {
    if (const char* env = std::getenv("EHRGATE_PASSWORD")) return env;

    std::string line;
    std::FILE* tty = std::fopen("/dev/tty", "r+");
    if (tty) {
        int fd = fileno(tty);
        termios saved{};
        bool restore = tcgetattr(fd, &saved) == 0;
        if (restore) {
            termios quiet = saved;
            quiet.c_lflag &= ~static_cast<tcflag_t>(ECHO);
            tcsetattr(fd, TCSAFLUSH, &quiet);
        }
        std::fputs("password: ", tty);
        std::fflush(tty);
        int c;
        while ((c = std::fgetc(tty)) != EOF && c != '\n') line += static_cast<char>(c);
        if (restore) tcsetattr(fd, TCSAFLUSH, &saved);
        std::fputs("\n", tty);
        std::fclose(tty);
    } else {
        err << "password: " << std::flush;
        if (!std::getline(std::cin, line)) throw cli_failure(exit_validation, "no password given");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

/// Audit events read straight from the log without opening the store, so
/// tailing never repairs or locks files a running server is writing.
class AuditReader {
public:
    explicit AuditReader(fs::path path) : path_(std::move(path)) {}

    std::vector<store::AuditEvent> poll() {
        std::vector<store::AuditEvent> out;
        std::ifstream in(path_, std::ios::binary);
        if (!in) {
            if (!fs::exists(path_)) return out;
            throw storage_io("cannot read " + path_.string());
        }
        in.seekg(static_cast<std::streamoff>(offset_));
        std::string chunk((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        std::size_t start = 0;
        for (std::size_t nl; (nl = chunk.find('\n', start)) != std::string::npos; start = nl + 1) {
            std::string_view line(chunk.data() + start, nl - start);
            if (line.empty()) continue;
            auto j = store::json::parse(line, nullptr, false);
            if (j.is_discarded()) throw parse_error("corrupt audit entry at byte " + std::to_string(offset_ + start));
            out.push_back(store::audit_from_json(j));
        }
        offset_ += start;
        return out;
    }

private:
    fs::path path_;
    std::size_t offset_ = 0;
};

int cmd_serve(const Globals& g, bool unsafe, std::ostream& out) {
    auto cfg = load_config(g);
    if (unsafe) cfg.unsafe_allow_all = true;

    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    gateway::Service service(cfg);
    service.start();
    out << "listening on " << service.address() << (cfg.unsafe_allow_all ? " (UNSAFE: policy checks disabled)" : "")
        << std::endl;
    int sig = 0;
    sigwait(&signals, &sig);
    service.stop();
    out << "stopped" << std::endl;
    return exit_ok;
}

int cmd_seed(const Globals& g, const std::string& fixture, bool generate, std::uint64_t seed, std::ostream& out) {
    auto cfg = load_config(g);
    if (generate) {
        harness::write_default_fixture(fixture, seed, cfg.pbkdf2_iterations);
        out << "generated fixture " << fixture << " (seed " << seed << ")\n";
    }
    harness::seed_data_dir(fixture, cfg.data_dir);
    store::HealthStore check(store_options(cfg));
    out << "seeded " << cfg.data_dir.string() << ": " << check.users().size() << " users, "
        << check.records().size() << " records, " << check.policy_table().size() << " policy tuples\n";
    return exit_ok;
}

int cmd_user_add(const Globals& g, const std::string& username, std::string role_text, bool admin,
                 std::ostream& out, std::ostream& err) {
    if (admin) {
        if (!role_text.empty() && role_text != "admin") {
            throw validation_error("--admin conflicts with --role " + role_text);
        }
        role_text = "admin";
    }
    if (role_text.empty()) throw validation_error("--role is required");
    auto role = policy::parse_role(role_text);
    if (role == policy::Role::admin && !admin) throw validation_error("admin accounts require --admin");

    auto cfg = load_config(g);
    auto password = prompt_password(err);
    if (password.empty()) throw validation_error("password must not be empty");
    store::HealthStore store(store_options(cfg));
    auto user = store.put_user({"", username, role, ""}, password, "cli");
    out << "added " << user.username << ' ' << user.user_id << ' ' << policy::to_string(user.role) << '\n';
    return exit_ok;
}

int cmd_policy_add(const Globals& g, const std::string& line, std::ostream& out) {
    auto tuple = policy::parse_policy_line(line);
    auto cfg = load_config(g);
    store::HealthStore store(store_options(cfg));
    store.put_policy(tuple);
    out << "added " << policy::format_policy_line(tuple) << '\n';
    return exit_ok;
}

int cmd_policy_list(const Globals& g, std::ostream& out) {
    auto cfg = load_config(g);
    auto path = cfg.data_dir / "policy.tbl";
    if (!fs::exists(path)) return exit_ok;
    out << policy::format_policy_table(policy::load_policy_table(path));
    return exit_ok;
}

int cmd_audit_tail(const Globals& g, bool follow, std::uint64_t from, std::ostream& out) {
    auto cfg = load_config(g);
    AuditReader reader(cfg.data_dir / "audit.ndjson");
    for (;;) {
        for (const auto& e : reader.poll()) {
            if (e.sequence >= from) out << store::format_audit_line(e) << '\n';
        }
        out.flush();
        if (!follow) return exit_ok;
        std::this_thread::sleep_for(std::chrono::milliseconds(500));
    }
}

struct SimulateArgs {
    std::string target;
    std::string short_ttl_target;
    std::string weakened_target;
    std::string fixture = "fixture";
    std::string out_dir = ".";
    std::uint64_t seed = 1;
    std::string scenario;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
    auto fixture = harness::Fixture::load(a.fixture);
    harness::Harness h(fixture);
    harness::Targets targets;
    targets.primary = harness::Target::parse(a.target);
    if (!a.short_ttl_target.empty()) targets.short_ttl = harness::Target::parse(a.short_ttl_target);
    if (!a.weakened_target.empty()) targets.weakened = harness::Target::parse(a.weakened_target);

    harness::Summary summary;
    summary.seed = a.seed;
    if (!a.scenario.empty()) {
        auto kind = harness::parse_scenario(a.scenario);
        if (!kind) throw validation_error("unknown scenario '" + a.scenario + "'");
        harness::Scenario s{*kind, {{"seed", std::to_string(a.seed)}}};
        const auto& t = (*kind == harness::ScenarioKind::expired_session_reuse && targets.short_ttl)
                            ? *targets.short_ttl
                            : targets.primary;
        summary.reports.push_back(h.run_scenario(s, t));
        if (targets.weakened && harness::detects_weakening(*kind)) {
            summary.reports.push_back(h.run_weakened_baseline(s, *targets.weakened));
        }
    } else {
        summary = h.run_all(a.seed, targets);
    }
    harness::write_reports(summary, a.out_dir);
    out << harness::format_report_text(summary);
    return summary.passed() ? exit_ok : exit_breach;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"ehrgate: identity-based access control gateway for health records", "ehrgate"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--config", g.config_path, "key=value configuration file");
    app.add_option("--data-dir", g.data_dir, "store directory (overrides config)");

    int code = exit_ok;
    std::function<int()> action;

    auto* serve = app.add_subcommand("serve", "run the gateway until SIGINT or SIGTERM");
    bool unsafe = false;
    serve->add_flag("--unsafe-allow-all", unsafe, "grant every request in full; harness baseline only");
    serve->callback([&] { action = [&] { return cmd_serve(g, unsafe, out); }; });

    auto* seed = app.add_subcommand("seed", "copy a fixture's users, records and policy into the store");
    std::string fixture_dir;
    bool generate = false;
    std::uint64_t seed_value = 1;
    seed->add_option("--fixture", fixture_dir, "fixture directory")->required();
    seed->add_flag("--generate", generate, "write the default fixture first");
    seed->add_option("--seed", seed_value, "seed for --generate");
    seed->callback([&] { action = [&] { return cmd_seed(g, fixture_dir, generate, seed_value, out); }; });

    auto* user_add = app.add_subcommand("user-add", "register a user; password from EHRGATE_PASSWORD or prompt");
    std::string username, role_text;
    bool admin = false;
    user_add->add_option("--username", username, "login name")->required();
    user_add->add_option("--role", role_text, "patient, physician, records_officer or admin");
    user_add->add_flag("--admin", admin, "create an admin account");
    user_add->callback([&] { action = [&] { return cmd_user_add(g, username, role_text, admin, out, err); }; });

    auto* policy_add = app.add_subcommand("policy-add", "add a role,mode,file_id,fields tuple");
    std::string policy_line;
    policy_add->add_option("tuple", policy_line, "policy line")->required();
    policy_add->callback([&] { action = [&] { return cmd_policy_add(g, policy_line, out); }; });

    auto* policy_list = app.add_subcommand("policy-list", "print the policy table");
    policy_list->callback([&] { action = [&] { return cmd_policy_list(g, out); }; });

    auto* audit_tail = app.add_subcommand("audit-tail", "print audit events in sequence order");
    bool follow = false;
    std::uint64_t from = 1;
    audit_tail->add_flag("--follow", follow, "keep printing new events");
    audit_tail->add_option("--from", from, "first sequence number");
    audit_tail->callback([&] { action = [&] { return cmd_audit_tail(g, follow, from, out); }; });

    auto* simulate = app.add_subcommand("simulate", "run the threat scenarios against a live gateway");
    SimulateArgs sim;
    simulate->add_option("--target", sim.target, "gateway host:port")->required();
    simulate->add_option("--seed", sim.seed, "scenario seed")->required();
    simulate->add_option("--short-ttl-target", sim.short_ttl_target, "gateway with a short session lifetime");
    simulate->add_option("--weakened-target", sim.weakened_target, "gateway started with --unsafe-allow-all");
    simulate->add_option("--fixture", sim.fixture, "fixture directory the targets were seeded from");
    simulate->add_option("--out", sim.out_dir, "directory for report.txt and report.ndjson");
    simulate->add_option("--scenario", sim.scenario, "run only this scenario");
    simulate->callback([&] { action = [&] { return cmd_simulate(sim, out); }; });

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return exit_validation;
    }

    try {
        code = action ? action() : exit_validation;
    } catch (const cli_failure& e) {
        err << "error: " << e.what() << '\n';
        code = e.code();
    } catch (const harness::target_unreachable& e) {
        err << "error: " << e.what() << '\n';
        code = exit_unreachable;
    } catch (const storage_io& e) {
        err << "error: " << e.what() << '\n';
        code = exit_io;
    } catch (const harness::fixture_error& e) {
        err << "error: " << e.what() << '\n';
        code = exit_io;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        code = exit_io;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        code = exit_validation;
    }
    return code;
}

} // namespace ehrgate::cli
