#include "ehrgate/agents/runtime.hpp"
#include "ehrgate/policy/policy_format.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <chrono>
#include <set>
#include <thread>

using namespace ehrgate;
using namespace ehrgate::agents;
using namespace ehrgate::policy;
using namespace std::chrono_literals;

namespace {

class RuntimeTest : public ::testing::Test {
protected:
    test::TempDir dir{"agents"};
    test::ManualClock clock;
    store::HealthStore store{test::fast_store(dir.path(), clock.fn())};
    std::unique_ptr<Runtime> runtime;

    void SetUp() override {
        auto pat = store.put_user({"", "pat_a", Role::patient, ""}, "pw-pat");
        store.put_user({"", "dr_a", Role::physician, ""}, "pw-dr");
        store.put_user({"", "officer", Role::records_officer, ""}, "pw-off");
        store.put_user({"", "admin", Role::admin, ""}, "pw-admin");
        for (auto line : {"physician,read,rec1,heart_rate", "physician,write,rec1,heart_rate",
                          "patient,read,rec1,age|blood_group", "admin,read,rec1,location"}) {
            store.put_policy(parse_policy_line(line));
        }
        HealthRecord rec{"rec1", pat.user_id, {}};
        for (auto f : all_fields) rec.values[f] = "orig-" + std::string(to_string(f));
        store.put_record(rec);
        start(options());
    }

    void TearDown() override {
        if (runtime) runtime->stop();
    }

    RuntimeOptions options() {
        RuntimeOptions o;
        o.auth_fail_delay = 20ms;
        o.sweep_interval_seconds = 0;
        o.clock = clock.fn();
        return o;
    }

    void start(RuntimeOptions o) {
        if (runtime) runtime->stop();
        runtime = std::make_unique<Runtime>(store, std::move(o));
        runtime->start();
    }

    std::string login(const std::string& user, const std::string& pw) {
        auto out = runtime->login(user, pw).get();
        EXPECT_EQ(out.status, Status::ok) << user;
        return out.session.token;
    }

    std::size_t count(store::AuditKind kind, const std::string& cid = {}) {
        std::size_t n = 0;
        for (const auto& e : store.read_audit()) {
            if (e.kind == kind && (cid.empty() || e.correlation_id == cid)) ++n;
        }
        return n;
    }
};

} // namespace

TEST_F(RuntimeTest, LoginEstablishesSessionAndKeepsCorrelationId) {
    auto out = runtime->login("dr_a", "pw-dr", "corr-login-1").get();
    ASSERT_EQ(out.status, Status::ok);
    EXPECT_EQ(out.correlation_id, "corr-login-1");
    EXPECT_EQ(out.role, Role::physician);
    EXPECT_EQ(out.session.token.size(), 64u);
    EXPECT_DOUBLE_EQ(out.session.expires_at - out.session.established_at, 3600);
    EXPECT_EQ(count(store::AuditKind::login_success, "corr-login-1"), 1u);
    EXPECT_EQ(count(store::AuditKind::connect_establish, "corr-login-1"), 1u);
}

TEST_F(RuntimeTest, EmptyUsernameStopsAtTheInterface) {
    auto before = runtime->agent(AgentKind::authentication).processed();
    auto out = runtime->login("", "pw").get();
    EXPECT_EQ(out.status, Status::validation_error);
    EXPECT_EQ(runtime->agent(AgentKind::authentication).processed(), before);
}

TEST_F(RuntimeTest, WrongPasswordAndUnknownUserLookTheSame) {
    auto wrong = runtime->login("dr_a", "nope").get();
    auto ghost = runtime->login("ghost", "anything").get();
    EXPECT_EQ(wrong.status, Status::invalid_credentials);
    EXPECT_EQ(ghost.status, Status::invalid_credentials);
    EXPECT_EQ(wrong.message, "invalid credentials");
    EXPECT_EQ(ghost.message, wrong.message);

    auto events = store.read_audit();
    std::vector<std::string> details;
    for (const auto& e : events) {
        if (e.kind == store::AuditKind::login_failure) details.push_back(e.detail);
    }
    ASSERT_EQ(details.size(), 2u);
    EXPECT_NE(details[0].find("wrong_password"), std::string::npos);
    EXPECT_NE(details[1].find("unknown_user"), std::string::npos);
}

TEST_F(RuntimeTest, FailedLoginIsDelayed) {
    auto o = options();
    o.auth_fail_delay = 200ms;
    start(o);
    auto t0 = std::chrono::steady_clock::now();
    auto out = runtime->login("dr_a", "nope").get();
    auto elapsed = std::chrono::steady_clock::now() - t0;
    EXPECT_EQ(out.status, Status::invalid_credentials);
    EXPECT_GE(elapsed, 195ms);
}

TEST_F(RuntimeTest, RoleWithoutPoliciesIsRefusedUniformly) {
    auto refused = runtime->login("officer", "pw-off", "corr-refuse").get();
    auto wrong = runtime->login("dr_a", "nope").get();
    EXPECT_EQ(refused.status, Status::invalid_credentials);
    EXPECT_EQ(refused.message, wrong.message);
    EXPECT_EQ(count(store::AuditKind::connect_refuse, "corr-refuse"), 1u);
    EXPECT_TRUE(refused.session.token.empty());
}

TEST_F(RuntimeTest, TwoLoginsGiveTwoValidTokens) {
    auto a = login("dr_a", "pw-dr");
    auto b = login("dr_a", "pw-dr");
    EXPECT_NE(a, b);
    EXPECT_TRUE(runtime->check_session(a).get().user_id);
    EXPECT_TRUE(runtime->check_session(b).get().user_id);
}

TEST_F(RuntimeTest, SessionValidityBoundaries) {
    auto out = runtime->login("dr_a", "pw-dr").get();
    const auto& s = out.session;
    EXPECT_TRUE(runtime->check_session(s.token, s.established_at + 1).get().user_id);
    EXPECT_FALSE(runtime->check_session(s.token, s.expires_at).get().user_id);
    runtime->revoke(s.token).get();
    EXPECT_FALSE(runtime->check_session(s.token, s.established_at + 1).get().user_id);
}

TEST_F(RuntimeTest, RevokeIsIdempotent) {
    auto token = login("dr_a", "pw-dr");
    auto first = runtime->revoke(token).get();
    auto second = runtime->revoke(token).get();
    EXPECT_EQ(first.status, Status::ok);
    EXPECT_TRUE(first.revoked);
    EXPECT_EQ(second.status, Status::ok);
    EXPECT_FALSE(second.revoked);
    EXPECT_EQ(count(store::AuditKind::revoke), 1u);
    EXPECT_EQ(runtime->read_record(token, "rec1").get().status, Status::not_authenticated);
}

TEST_F(RuntimeTest, RevokingUnknownTokenCreatesNothing) {
    auto out = runtime->revoke(std::string(64, 'a')).get();
    EXPECT_EQ(out.status, Status::ok);
    EXPECT_FALSE(out.revoked);
    EXPECT_TRUE(store.sessions().empty());
}

TEST_F(RuntimeTest, SweepRemovesExactlyExpiredSessions) {
    EXPECT_EQ(runtime->sweep().get().purged, 0u);

    auto o = options();
    o.session_ttl_seconds = 10;
    start(o);
    login("dr_a", "pw-dr");
    login("dr_a", "pw-dr");
    clock.advance(5);
    auto late = login("dr_a", "pw-dr");
    clock.advance(6); // first two expired, third has 4 s left

    EXPECT_EQ(runtime->sweep().get().purged, 2u);
    EXPECT_EQ(runtime->sweep().get().purged, 0u);
    ASSERT_EQ(store.sessions().size(), 1u);
    EXPECT_EQ(store.sessions()[0].token, late);
}

TEST_F(RuntimeTest, UnknownTokenIsNotAuthenticated) {
    auto out = runtime->read_record(std::string(64, 'f'), "rec1").get();
    EXPECT_EQ(out.status, Status::not_authenticated);
    EXPECT_FALSE(out.record);
    EXPECT_EQ(count(store::AuditKind::access_denied), 0u);
}

TEST_F(RuntimeTest, ExpiredTokenIsNotAuthenticated) {
    auto token = login("dr_a", "pw-dr");
    clock.advance(3601);
    EXPECT_EQ(runtime->read_record(token, "rec1").get().status, Status::not_authenticated);
}

TEST_F(RuntimeTest, ReadIsRedactedToGrant) {
    auto token = login("dr_a", "pw-dr");
    auto out = runtime->read_record(token, "rec1", {FieldId::heart_rate, FieldId::age}, "corr-read").get();
    ASSERT_EQ(out.status, Status::ok);
    ASSERT_TRUE(out.record);
    ASSERT_EQ(out.record->values.size(), 1u);
    EXPECT_TRUE(out.record->values.count(FieldId::heart_rate));
    EXPECT_EQ(count(store::AuditKind::access_granted, "corr-read"), 1u);
}

TEST_F(RuntimeTest, UngrantedReadIsDeniedAndAudited) {
    auto token = login("pat_a", "pw-pat");
    auto out = runtime->read_record(token, "rec1", {FieldId::heart_rate}, "corr-deny").get();
    EXPECT_EQ(out.status, Status::access_denied);
    EXPECT_FALSE(out.record);
    EXPECT_EQ(count(store::AuditKind::access_denied, "corr-deny"), 1u);
}

TEST_F(RuntimeTest, GrantedReadOfMissingRecordIsNotFound) {
    auto dr = login("dr_a", "pw-dr");
    store.put_policy(parse_policy_line("physician,read,rec9,*"));
    EXPECT_EQ(runtime->read_record(dr, "rec9").get().status, Status::not_found);
}

TEST_F(RuntimeTest, StrictWriteIsAllOrNothing) {
    auto token = login("dr_a", "pw-dr");
    auto ok = runtime->write_record(token, "rec1", {{FieldId::heart_rate, std::string("72")}}).get();
    EXPECT_EQ(ok.status, Status::ok);
    EXPECT_EQ(std::get<std::string>(store.get_record("rec1")->values.at(FieldId::heart_rate)), "72");

    auto denied = runtime->write_record(token, "rec1",
                                        {{FieldId::heart_rate, std::string("99")}, {FieldId::age, std::string("1")}})
                      .get();
    EXPECT_EQ(denied.status, Status::access_denied);
    auto rec = store.get_record("rec1");
    EXPECT_EQ(std::get<std::string>(rec->values.at(FieldId::heart_rate)), "72");
    EXPECT_EQ(std::get<std::string>(rec->values.at(FieldId::age)), "orig-age");
}

TEST_F(RuntimeTest, AuditQueryNeedsAdmin) {
    auto dr = login("dr_a", "pw-dr");
    EXPECT_EQ(runtime->read_audit(dr, 1).get().status, Status::access_denied);
    auto admin = login("admin", "pw-admin");
    auto out = runtime->read_audit(admin, 1).get();
    ASSERT_EQ(out.status, Status::ok);
    EXPECT_EQ(out.events.size(), store.read_audit().size());
}

TEST_F(RuntimeTest, AdminRegistrationNeedsExplicitPermission) {
    EXPECT_EQ(runtime->register_user("boss", "pw", Role::admin).get().status, Status::validation_error);
    EXPECT_EQ(runtime->register_user("boss", "pw", Role::admin, true).get().status, Status::ok);
    EXPECT_EQ(runtime->register_user("boss", "pw", Role::patient).get().status, Status::duplicate_username);
}

TEST_F(RuntimeTest, UnsafeModeSkipsPolicyButNotAuthentication) {
    auto o = options();
    o.unsafe_allow_all = true;
    start(o);
    auto token = login("pat_a", "pw-pat");
    auto out = runtime->read_record(token, "rec1").get();
    ASSERT_EQ(out.status, Status::ok);
    EXPECT_EQ(out.record->values.size(), 12u);
    EXPECT_EQ(runtime->login("pat_a", "bad").get().status, Status::invalid_credentials);
    EXPECT_EQ(runtime->read_record(std::string(64, '0'), "rec1").get().status, Status::not_authenticated);
}

TEST_F(RuntimeTest, ThousandInterleavedInteractions) {
    constexpr int threads = 8, per_thread = 125;
    std::atomic<int> mismatched{0}, failures{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            for (int i = 0; i < per_thread; ++i) {
                auto cid = "t" + std::to_string(t) + "-" + std::to_string(i);
                switch (i % 4) {
                    case 0: {
                        auto out = runtime->login("dr_a", "pw-dr", cid).get();
                        if (out.correlation_id != cid) ++mismatched;
                        if (out.status != Status::ok) ++failures;
                        break;
                    }
                    case 1: {
                        auto out = runtime->login("dr_a", "bad", cid).get();
                        if (out.correlation_id != cid) ++mismatched;
                        if (out.status != Status::invalid_credentials) ++failures;
                        break;
                    }
                    case 2: {
                        auto token = runtime->login("pat_a", "pw-pat").get().session.token;
                        auto out = runtime->read_record(token, "rec1", FieldSet::wildcard(), cid).get();
                        if (out.correlation_id != cid) ++mismatched;
                        if (out.status != Status::ok || out.record->values.size() != 2) ++failures;
                        break;
                    }
                    default: {
                        auto token = runtime->login("dr_a", "pw-dr").get().session.token;
                        runtime->revoke(token).get();
                        auto out = runtime->read_record(token, "rec1", FieldSet::wildcard(), cid).get();
                        if (out.correlation_id != cid) ++mismatched;
                        if (out.status != Status::not_authenticated) ++failures;
                        break;
                    }
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    EXPECT_EQ(mismatched.load(), 0);
    EXPECT_EQ(failures.load(), 0);

    auto events = store.read_audit();
    for (std::size_t i = 0; i < events.size(); ++i) ASSERT_EQ(events[i].sequence, i + 1);
    std::size_t reads = 0;
    for (int i = 0; i < per_thread; ++i) reads += i % 4 == 2;
    EXPECT_EQ(count(store::AuditKind::access_granted), reads * threads);
}

namespace {

/// Blocks in handle() until released; tracks overlap.
class GateAgent : public Agent {
public:
    GateAgent(std::size_t bound) : Agent(AgentKind::authentication, bound) {}

    std::mutex mutex;
    std::condition_variable cv;
    bool open = false;
    std::atomic<int> active{0}, max_active{0};
    std::set<std::thread::id> threads;

protected:
    void handle(AgentMessage) override {
        int now = ++active;
        int prev = max_active.load();
        while (now > prev && !max_active.compare_exchange_weak(prev, now)) {}
        {
            std::unique_lock lock(mutex);
            threads.insert(std::this_thread::get_id());
            cv.wait(lock, [&] { return open; });
        }
        --active;
    }
};

AgentMessage sweep_message() { return {"cid", ExpireSweep{std::nullopt, nullptr}}; }

} // namespace

TEST(AgentTest, InboxIsBoundedAndHandledSerially) {
    GateAgent agent(4);
    agent.start();
    auto m = sweep_message();
    ASSERT_TRUE(agent.post(m));
    while (agent.processed() == 0 && agent.max_active.load() == 0) std::this_thread::sleep_for(1ms);
    int accepted = 0;
    for (int i = 0; i < 10; ++i) {
        auto msg = sweep_message();
        if (agent.post(msg)) ++accepted;
    }
    EXPECT_EQ(accepted, 4);
    {
        std::lock_guard lock(agent.mutex);
        agent.open = true;
    }
    agent.cv.notify_all();
    agent.stop();
    EXPECT_EQ(agent.processed(), 5u);
    EXPECT_EQ(agent.max_active.load(), 1);
    EXPECT_EQ(agent.threads.size(), 1u);
    auto late = sweep_message();
    EXPECT_FALSE(agent.post(late));
}
