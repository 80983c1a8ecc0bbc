#include "ehrgate/common/error.hpp"
#include "ehrgate/policy/evaluate.hpp"
#include "ehrgate/policy/field.hpp"
#include "ehrgate/policy/oracle.hpp"
#include "ehrgate/policy/policy_format.hpp"
#include "ehrgate/policy/policy_table.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace ehrgate;
using namespace ehrgate::policy;

namespace {

User user(std::string id, std::string name, Role role) { return {std::move(id), std::move(name), role, "cred"}; }

HealthRecord full_record(const std::string& file_id) {
    HealthRecord r{file_id, "u-pat", {}};
    for (auto f : all_fields) r.values[f] = "v-" + std::string(to_string(f));
    return r;
}

FieldSet random_set(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> coin(0, 15);
    if (coin(rng) == 0) return FieldSet::wildcard();
    std::uniform_int_distribution<unsigned> bits(0, (1u << field_count) - 1);
    return FieldSet::from_bits(bits(rng));
}

} // namespace

// --- field catalog -----------------------------------------------------------

TEST(FieldCatalog, TwelveFieldsInThreeGroups) {
    ASSERT_EQ(all_fields.size(), 12u);
    EXPECT_EQ(group_of(FieldId::location), FieldGroup::environment);
    EXPECT_EQ(group_of(FieldId::collected_at), FieldGroup::environment);
    EXPECT_EQ(group_of(FieldId::bgm), FieldGroup::patient_info);
    EXPECT_EQ(group_of(FieldId::operation_history), FieldGroup::current_medical);
    for (auto f : all_fields) EXPECT_EQ(parse_field(to_string(f)), f);
    EXPECT_FALSE(parse_field("shoe_size"));
}

TEST(FieldCatalog, MakeFieldRejectsWrongGroup) {
    EXPECT_EQ(make_field(FieldGroup::current_medical, "heart_rate"), FieldId::heart_rate);
    EXPECT_THROW(make_field(FieldGroup::environment, "heart_rate"), validation_error);
    EXPECT_THROW(make_field(FieldGroup::environment, "shoe_size"), validation_error);
}

TEST(FieldSetTest, WildcardEqualsFullExplicitSet) {
    FieldSet all;
    for (auto f : all_fields) all.insert(f);
    EXPECT_EQ(all, FieldSet::wildcard());
    EXPECT_EQ(FieldSet::wildcard().size(), 12u);
    EXPECT_TRUE(FieldSet::none().empty());
    EXPECT_FALSE(FieldSet::wildcard().empty());
}

TEST(FieldSetTest, IntersectAndUnite) {
    FieldSet a{FieldId::age, FieldId::heart_rate};
    FieldSet b{FieldId::heart_rate, FieldId::weight};
    EXPECT_EQ(intersect(a, b), (FieldSet{FieldId::heart_rate}));
    EXPECT_EQ(unite(a, b), (FieldSet{FieldId::age, FieldId::heart_rate, FieldId::weight}));
    EXPECT_EQ(intersect(a, FieldSet::wildcard()), a);
    EXPECT_TRUE(intersect(FieldSet::wildcard(), FieldSet::wildcard()).is_wildcard());
    EXPECT_TRUE(unite(a, FieldSet::wildcard()).is_wildcard());
    EXPECT_TRUE(intersect(a, FieldSet::none()).empty());
}

TEST(FieldSetTest, TextRoundTrip) {
    EXPECT_EQ(FieldSet::wildcard().to_string(), "*");
    FieldSet s{FieldId::sugar_level, FieldId::age};
    EXPECT_EQ(s.to_string(), "age|sugar_level");
    EXPECT_EQ(FieldSet::parse("age|sugar_level"), s);
    EXPECT_TRUE(FieldSet::parse("*").is_wildcard());
    EXPECT_TRUE(FieldSet::parse("").empty());
    EXPECT_THROW(FieldSet::parse("age|shoe_size"), parse_error);
    EXPECT_THROW(FieldSet::parse("age|age"), parse_error);
}

TEST(FieldSetTest, RandomTextRoundTrip) {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 500; ++i) {
        auto s = random_set(rng);
        auto back = FieldSet::parse(s.to_string());
        EXPECT_EQ(back, s);
        EXPECT_EQ(back.is_wildcard(), s.is_wildcard());
    }
}

// --- roles and modes ----------------------------------------------------------

TEST(Types, RoleParsing) {
    EXPECT_EQ(parse_role("records_officer"), Role::records_officer);
    try {
        parse_role("wizard");
        FAIL();
    } catch (const parse_error& e) {
        EXPECT_NE(std::string(e.what()).find("wizard"), std::string::npos);
    }
    EXPECT_EQ(parse_mode("write"), AccessMode::write);
    EXPECT_THROW(parse_mode("delete"), parse_error);
}

// --- policy table -------------------------------------------------------------

TEST(PolicyTableTest, DuplicateKeysMergeByUnion) {
    PolicyTable t;
    t.insert({Role::physician, AccessMode::read, "rec1", {FieldId::age}});
    t.insert({Role::physician, AccessMode::read, "rec1", {FieldId::height}});
    ASSERT_EQ(t.size(), 1u);
    EXPECT_EQ(*t.find(Role::physician, AccessMode::read, "rec1"), (FieldSet{FieldId::age, FieldId::height}));
    EXPECT_EQ(t.find(Role::physician, AccessMode::write, "rec1"), nullptr);
    EXPECT_TRUE(t.has_role(Role::physician));
    EXPECT_FALSE(t.has_role(Role::patient));
}

TEST(PolicyTableTest, InsertionOrderDoesNotMatter) {
    std::mt19937_64 rng(5);
    std::vector<PolicyTuple> tuples;
    for (int i = 0; i < 40; ++i) {
        tuples.push_back({all_roles[rng() % 4], rng() % 2 ? AccessMode::read : AccessMode::write,
                          "rec" + std::to_string(rng() % 3), random_set(rng)});
    }
    PolicyTable forward(tuples);
    std::shuffle(tuples.begin(), tuples.end(), rng);
    PolicyTable shuffled(tuples);
    EXPECT_EQ(forward, shuffled);
}

// --- line format --------------------------------------------------------------

TEST(PolicyFormat, ParsesFieldList) {
    auto t = parse_policy_line("physician,read,rec1,heart_rate|blood_pressure");
    EXPECT_EQ(t.role, Role::physician);
    EXPECT_EQ(t.mode, AccessMode::read);
    EXPECT_EQ(t.file_id, "rec1");
    EXPECT_EQ(t.fields.size(), 2u);
}

TEST(PolicyFormat, ParsesWildcardAndTabs) {
    EXPECT_TRUE(parse_policy_line("physician,read,rec1,*").fields.is_wildcard());
    auto t = parse_policy_line("patient\twrite\trec9\tage");
    EXPECT_EQ(t.mode, AccessMode::write);
    EXPECT_EQ(t.fields, FieldSet{FieldId::age});
}

TEST(PolicyFormat, MergesDuplicateLines) {
    auto table = parse_policy_table("physician,read,rec1,age\nphysician,read,rec1,height\n");
    ASSERT_EQ(table.size(), 1u);
    EXPECT_EQ(table.tuples()[0].fields, (FieldSet{FieldId::age, FieldId::height}));
    EXPECT_EQ(format_policy_table(table), "physician,read,rec1,age|height\n");
}

TEST(PolicyFormat, SkipsCommentsAndBlankLines) {
    auto tuples = parse_policy_tuples("# header\n\nadmin,read,rec1,location\n  \n");
    ASSERT_EQ(tuples.size(), 1u);
    EXPECT_EQ(tuples[0].role, Role::admin);
}

TEST(PolicyFormat, ErrorsCarryLineNumbers) {
    try {
        parse_policy_table("admin,read,rec1,location\nwizard,read,rec1,*\n");
        FAIL();
    } catch (const parse_error& e) {
        EXPECT_EQ(e.line(), 2u);
        EXPECT_NE(std::string(e.what()).find("wizard"), std::string::npos);
    }
    EXPECT_THROW(parse_policy_line("physician,read,rec1"), parse_error);
    EXPECT_THROW(parse_policy_line("physician,read,,age"), parse_error);
    EXPECT_THROW(parse_policy_line("physician,peek,rec1,age"), parse_error);
    EXPECT_THROW(parse_policy_line("physician,read,rec1,shoe_size"), parse_error);
    EXPECT_THROW(parse_policy_line("physician,read,rec1,age,extra"), parse_error);
}

TEST(PolicyFormat, RandomTablesRoundTripBitExactly) {
    std::mt19937_64 rng(3);
    for (int round = 0; round < 200; ++round) {
        PolicyTable table;
        for (int i = 0, n = static_cast<int>(rng() % 12); i < n; ++i) {
            table.insert({all_roles[rng() % 4], rng() % 2 ? AccessMode::read : AccessMode::write,
                          "f" + std::to_string(rng() % 5), random_set(rng)});
        }
        auto text = format_policy_table(table);
        auto back = parse_policy_table(text);
        EXPECT_EQ(back, table);
        EXPECT_EQ(format_policy_table(back), text);
    }
}

TEST(PolicyFormat, SaveAndLoad) {
    test::TempDir dir;
    auto table = parse_policy_table("physician,read,rec1,age\nphysician,read,rec1,height\nadmin,read,rec2,*\n");
    save_policy_table(table, dir / "policy.tbl");
    EXPECT_EQ(load_policy_table(dir / "policy.tbl"), table);
    EXPECT_THROW(load_policy_table(dir / "missing.tbl"), storage_io);
}

// --- connection gate ----------------------------------------------------------

TEST(EvaluateConnection, Examples) {
    std::vector<User> users{user("u1", "dr_a", Role::physician), user("u2", "pat_b", Role::patient)};
    PolicyTable table;
    table.insert({Role::physician, AccessMode::read, "rec1", {FieldId::heart_rate}});

    auto ok = evaluate_connection("dr_a", users, table);
    EXPECT_TRUE(ok.established());
    EXPECT_EQ(ok.reason, ConnectReason::ok);

    auto ghost = evaluate_connection("ghost", users, table);
    EXPECT_EQ(ghost.outcome, ConnectOutcome::no_connection);
    EXPECT_EQ(ghost.reason, ConnectReason::unknown_user);

    auto no_policy = evaluate_connection("pat_b", users, PolicyTable{});
    EXPECT_EQ(no_policy.outcome, ConnectOutcome::no_connection);
    EXPECT_EQ(no_policy.reason, ConnectReason::no_policy_for_role);
}

// --- access decision ----------------------------------------------------------

TEST(EvaluateAccess, IntersectsRequestWithGrant) {
    auto dr = user("u1", "dr_a", Role::physician);
    PolicyTable table;
    table.insert({Role::physician, AccessMode::read, "rec1", {FieldId::heart_rate}});
    auto d = evaluate_access({"u1", AccessMode::read, "rec1", {FieldId::heart_rate, FieldId::blood_pressure}}, dr, table);
    EXPECT_TRUE(d.granted());
    EXPECT_EQ(d.granted_fields, FieldSet{FieldId::heart_rate});
}

TEST(EvaluateAccess, WildcardIdentity) {
    auto dr = user("u1", "dr_a", Role::physician);
    PolicyTable table;
    table.insert({Role::physician, AccessMode::read, "rec1", FieldSet::wildcard()});
    auto d = evaluate_access({"u1", AccessMode::read, "rec1", FieldSet::wildcard()}, dr, table);
    EXPECT_TRUE(d.granted());
    EXPECT_TRUE(d.granted_fields.is_wildcard());
}

TEST(EvaluateAccess, ModeMustMatch) {
    auto dr = user("u1", "dr_a", Role::physician);
    PolicyTable table;
    table.insert({Role::physician, AccessMode::read, "rec1", FieldSet::wildcard()});
    auto d = evaluate_access({"u1", AccessMode::write, "rec1", {FieldId::age}}, dr, table);
    EXPECT_FALSE(d.granted());
    EXPECT_EQ(d.reason, AccessReason::no_matching_tuple);
}

TEST(EvaluateAccess, EmptyIntersectionDenies) {
    auto dr = user("u1", "dr_a", Role::physician);
    PolicyTable table;
    table.insert({Role::physician, AccessMode::read, "rec1", {FieldId::heart_rate}});
    auto d = evaluate_access({"u1", AccessMode::read, "rec1", {FieldId::age}}, dr, table);
    EXPECT_FALSE(d.granted());
    EXPECT_TRUE(d.granted_fields.empty());
}

TEST(EvaluateAccess, EmptyTableDenies) {
    auto dr = user("u1", "dr_a", Role::physician);
    EXPECT_FALSE(evaluate_access({"u1", AccessMode::read, "rec1", FieldSet::wildcard()}, dr, PolicyTable{}).granted());
    EXPECT_FALSE(oracle_evaluate({"u1", AccessMode::read, "rec1", FieldSet::wildcard()}, dr, {}).granted());
}

TEST(EvaluateAccess, OtherRolesTuplesAreIgnored) {
    auto pat = user("u2", "pat_a", Role::patient);
    PolicyTable table;
    table.insert({Role::physician, AccessMode::read, "rec1", FieldSet::wildcard()});
    EXPECT_FALSE(evaluate_access({"u2", AccessMode::read, "rec1", FieldSet::wildcard()}, pat, table).granted());
}

TEST(EvaluateAccess, ShrinkingTheRequestNeverWidensTheGrant) {
    std::mt19937_64 rng(17);
    auto dr = user("u1", "dr_a", Role::physician);
    for (int round = 0; round < 300; ++round) {
        PolicyTable table;
        table.insert({Role::physician, AccessMode::read, "rec1", random_set(rng)});
        auto big = random_set(rng);
        auto small = intersect(big, random_set(rng));
        auto d_big = evaluate_access({"u1", AccessMode::read, "rec1", big}, dr, table);
        auto d_small = evaluate_access({"u1", AccessMode::read, "rec1", small}, dr, table);
        if (!d_big.granted()) {
            EXPECT_FALSE(d_small.granted());
        }
        EXPECT_TRUE(d_small.granted_fields.is_subset_of(d_big.granted_fields));
    }
}

TEST(EvaluateAccess, AgreesWithOracleOnRandomTables) {
    std::mt19937_64 rng(23);
    std::vector<User> people{user("p", "p", Role::patient), user("d", "d", Role::physician),
                             user("o", "o", Role::records_officer), user("a", "a", Role::admin)};
    for (int round = 0; round < 2000; ++round) {
        std::vector<PolicyTuple> tuples;
        for (int i = 0, n = static_cast<int>(rng() % 10); i < n; ++i) {
            tuples.push_back({all_roles[rng() % 4], rng() % 2 ? AccessMode::read : AccessMode::write,
                              "rec" + std::to_string(rng() % 3), random_set(rng)});
        }
        PolicyTable table(tuples);
        const auto& who = people[rng() % people.size()];
        AccessRequest req{who.user_id, rng() % 2 ? AccessMode::read : AccessMode::write,
                          "rec" + std::to_string(rng() % 3), random_set(rng)};
        auto fast = evaluate_access(req, who, table);
        auto slow = oracle_evaluate(req, who, tuples);
        ASSERT_EQ(fast, slow) << "round " << round;
    }
}

// --- redaction ----------------------------------------------------------------

TEST(FilterRecord, RestrictsToGrantedFields) {
    auto rec = full_record("rec1");
    auto two = filter_record(rec, {FieldId::age, FieldId::blood_group});
    EXPECT_EQ(two.values.size(), 2u);
    EXPECT_EQ(two.values.at(FieldId::age), rec.values.at(FieldId::age));
    EXPECT_EQ(filter_record(rec, FieldSet::wildcard()).values, rec.values);
    EXPECT_TRUE(filter_record(rec, FieldSet::none()).values.empty());
    EXPECT_EQ(two.file_id, "rec1");
}
