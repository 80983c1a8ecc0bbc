#include "cli.hpp"

#include "ehrgate/agents/runtime.hpp"
#include "ehrgate/policy/policy_format.hpp"

#include "fixture_service.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace ehrgate;

namespace {

struct CliRun {
    int code;
    std::string out;
    std::string err;
};

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class CliTest : public ::testing::Test {
protected:
    test::TempDir dir{"cli"};

    void SetUp() override {
        std::ofstream cfg(dir / "ehrgate.cfg");
        cfg << "data_dir=" << (dir / "data").string() << "\npbkdf2_iterations=" << test::test_iterations << "\n";
    }

    CliRun run(std::vector<std::string> args) {
        args.insert(args.begin(), {"--config", (dir / "ehrgate.cfg").string()});
        std::ostringstream out, err;
        int code = cli::run_cli(args, out, err);
        return {code, out.str(), err.str()};
    }

    std::string golden(const std::string& name) { return slurp(std::filesystem::path(EHRGATE_GOLDEN_DIR) / name); }
};

} // namespace

TEST_F(CliTest, HelpExitsZero) {
    auto r = run({"--help"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("policy-add"), std::string::npos);
}

TEST_F(CliTest, UnknownVerbIsUsageError) {
    auto r = run({"frobnicate"});
    EXPECT_EQ(r.code, 1);
    EXPECT_FALSE(r.err.empty());
}

TEST_F(CliTest, PolicyAddThenListShowsWildcard) {
    auto add = run({"policy-add", "physician,read,rec1,*"});
    EXPECT_EQ(add.code, 0) << add.err;
    auto list = run({"policy-list"});
    EXPECT_EQ(list.code, 0);
    EXPECT_EQ(list.out, "physician,read,rec1,*\n");
}

TEST_F(CliTest, PolicyAddRejectsUnknownRole) {
    auto r = run({"policy-add", "wizard,read,rec1,*"});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("wizard"), std::string::npos);
    EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);
}

TEST_F(CliTest, PolicyListMatchesGolden) {
    for (auto line : {"records_officer,write,rec2,*", "patient,read,rec1,age", "physician,read,rec1,heart_rate",
                      "patient,read,rec1,blood_group", "admin,read,rec1,location",
                      "physician\twrite\trec1\theart_rate|blood_pressure"}) {
        ASSERT_EQ(run({"policy-add", line}).code, 0) << line;
    }
    auto first = run({"policy-list"});
    EXPECT_EQ(first.out, golden("policy_list.txt"));
    EXPECT_EQ(run({"policy-list"}).out, first.out);
}

TEST_F(CliTest, UserAddReadsPasswordFromEnvironment) {
    ::setenv("EHRGATE_PASSWORD", "s3cret-pw", 1);
    auto r = run({"user-add", "--username", "dr_x", "--role", "physician"});
    auto dup = run({"user-add", "--username", "dr_x", "--role", "physician"});
    auto admin_no_flag = run({"user-add", "--username", "boss", "--role", "admin"});
    auto admin = run({"user-add", "--username", "boss", "--admin"});
    ::unsetenv("EHRGATE_PASSWORD");
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out.rfind("added dr_x u-", 0), 0u) << r.out;
    EXPECT_EQ(dup.code, 1);
    EXPECT_EQ(admin_no_flag.code, 1);
    EXPECT_EQ(admin.code, 0) << admin.err;

    store::HealthStore st(test::fast_store(dir / "data"));
    EXPECT_TRUE(st.verify_credentials("dr_x", "s3cret-pw").ok());
    EXPECT_EQ(st.find_user("boss")->role, policy::Role::admin);
}

TEST_F(CliTest, PasswordIsNeverAnArgument) {
    auto r = run({"user-add", "--username", "dr_x", "--role", "physician", "--password", "pw"});
    EXPECT_EQ(r.code, 1);
}

TEST_F(CliTest, AuditTailAfterLogin) {
    {
        store::HealthStore st(test::fast_store(dir / "data"));
        st.put_user({"", "dr_a", policy::Role::physician, ""}, "pw");
        st.put_policy(policy::parse_policy_line("physician,read,rec1,heart_rate"));
        agents::RuntimeOptions o;
        o.sweep_interval_seconds = 0;
        agents::Runtime rt(st, o);
        rt.start();
        ASSERT_EQ(rt.login("dr_a", "pw", "cli-login").get().status, agents::Status::ok);
        rt.stop();
    }
    auto r = run({"audit-tail"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto success = r.out.find("\tlogin_success\t");
    auto establish = r.out.find("\tconnect_establish\t");
    ASSERT_NE(success, std::string::npos);
    ASSERT_NE(establish, std::string::npos);
    EXPECT_LT(success, establish);

    auto from = run({"audit-tail", "--from", "3"});
    EXPECT_EQ(from.out.rfind("3\t", 0), 0u);
}

TEST_F(CliTest, AuditTailMatchesGolden) {
    test::ManualClock clock(1700000000.25);
    {
        store::HealthStore st(test::fast_store(dir / "data", clock.fn()));
        st.append_audit({0, 0, "c-1", "dr_a", store::AuditKind::login_success, "", std::nullopt});
        clock.advance(0.5);
        st.append_audit({0, 0, "c-1", "dr_a", store::AuditKind::connect_establish, "ttl=3600", std::nullopt});
        clock.advance(1);
        st.append_audit({0, 0, "c-2", "dr_a", store::AuditKind::access_granted,
                         "mode=read file=rec1 requested=* session=valid reason=ok",
                         policy::FieldSet{policy::FieldId::heart_rate}});
        st.append_audit({0, 0, "c-3", "dr_a", store::AuditKind::access_denied,
                         "mode=read file=rec1 requested=age session=valid reason=no_matching_tuple",
                         policy::FieldSet{}});
    }
    auto r = run({"audit-tail"});
    EXPECT_EQ(r.out, golden("audit_tail.txt"));
}

TEST_F(CliTest, IoErrorsExitTwo) {
    std::ostringstream out, err;
    EXPECT_EQ(cli::run_cli({"--config", (dir / "missing.cfg").string(), "policy-list"}, out, err), 2);
    auto r = run({"seed", "--fixture", (dir / "no-fixture").string()});
    EXPECT_EQ(r.code, 2);
}

TEST_F(CliTest, SeedGeneratesAndLoadsFixture) {
    auto r = run({"seed", "--fixture", (dir / "fx").string(), "--generate", "--seed", "4"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("6 users, 2 records, 10 policy tuples"), std::string::npos) << r.out;
    EXPECT_EQ(run({"policy-list"}).out, policy::format_policy_table(policy::load_policy_table(dir / "fx/policy.tbl")));
}

TEST_F(CliTest, SimulateUnreachableExitsThree) {
    harness::write_default_fixture(dir / "fx", 1, test::test_iterations);
    auto r = run({"simulate", "--target", "127.0.0.1:1", "--seed", "1", "--fixture", (dir / "fx").string()});
    EXPECT_EQ(r.code, 3);
    EXPECT_NE(r.err.find("127.0.0.1:1"), std::string::npos);
}

TEST_F(CliTest, SimulateWritesReports) {
    harness::write_default_fixture(dir / "fx", 1, test::test_iterations);
    auto svc = test::start_service(dir / "fx", dir / "served", {.fail_delay_ms = 5});
    auto r = run({"simulate", "--target", test::target_of(*svc).str(), "--seed", "1", "--fixture",
                  (dir / "fx").string(), "--scenario", "session_hijack", "--out", (dir / "reports").string()});
    svc->stop();
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("result: PASS"), std::string::npos);
    EXPECT_EQ(slurp(dir / "reports/report.txt"), r.out);
    EXPECT_NE(slurp(dir / "reports/report.ndjson").find("\"scenario\":\"session_hijack\""), std::string::npos);
}
