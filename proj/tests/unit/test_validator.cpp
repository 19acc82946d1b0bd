#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "patchvm/corpus.hpp"
#include "patchvm/pollution.hpp"
#include "patchvm/report.hpp"
#include "patchvm/reset.hpp"
#include "patchvm/validator.hpp"

using namespace patchvm;

namespace {

TestId tid(const char* s) { return TestId::parse(s); }

std::vector<TestId> ids(std::initializer_list<const char*> names) {
    std::vector<TestId> out;
    for (auto n : names) out.push_back(tid(n));
    return out;
}

const std::vector<TestId> kAll = ids({"T.t1", "T.t2", "T.t3"});

std::size_t position(const std::vector<TestId>& order, const TestId& t) {
    return static_cast<std::size_t>(std::find(order.begin(), order.end(), t) - order.begin()) + 1;
}

std::size_t error_count(const StatusMap& m) {
    return static_cast<std::size_t>(
        std::count_if(m.begin(), m.end(), [](const auto& kv) { return is_error(kv.second.status); }));
}

}  // namespace

TEST(OrderTests, FailingFirst) { EXPECT_EQ(order_tests(kAll, ids({"T.t2"})), ids({"T.t2", "T.t1", "T.t3"})); }

TEST(OrderTests, NoFailing) { EXPECT_EQ(order_tests(kAll, {}), kAll); }

TEST(OrderTests, AllFailing) { EXPECT_EQ(order_tests(kAll, kAll), kAll); }

TEST(OrderTests, FailingOrderKept) {
    EXPECT_EQ(order_tests(kAll, ids({"T.t3", "T.t1"})), ids({"T.t3", "T.t1", "T.t2"}));
}

TEST(OrderTests, UnknownFailingTest) { EXPECT_THROW(order_tests(kAll, ids({"T.t9"})), UnknownTestError); }

TEST(Manifest, ParsesCommentsAndFailingPrefix) {
    auto suite = parse_manifest("# header\nA.one\nfailing: A.two   # trailing\n\n  A.three\n");
    EXPECT_EQ(suite.tests, ids({"A.one", "A.two", "A.three"}));
    EXPECT_EQ(suite.failing, ids({"A.two"}));
}

TEST(Manifest, RejectsMalformedIds) { EXPECT_THROW(parse_manifest("not-a-test\n"), ConfigError); }

TEST(Modes, Parsing) {
    EXPECT_EQ(parse_mode("RESET"), Mode::Reset);
    EXPECT_EQ(parse_mode("vanilla"), Mode::Vanilla);
    EXPECT_EQ(parse_mode("Restart"), Mode::Restart);
    EXPECT_THROW(parse_mode("fast"), ConfigError);
    EXPECT_EQ(parse_status("NON_PLAUSIBLE"), ValidationStatus::NonPlausible);
    EXPECT_THROW(parse_status("MAYBE"), ConfigError);
}

TEST(Validate, EmptyPool) {
    auto fx = reftest::load_fixture("plain");
    for (Mode m : {Mode::Restart, Mode::Vanilla, Mode::Reset}) {
        auto r = validate_pool(fx.classpath, fx.suite.tests, {}, fx.config(m));
        EXPECT_TRUE(r.statuses.empty());
        EXPECT_EQ(r.sessions_created, 0u);
    }
}

TEST(Validate, CorrectPatchPlausibleInAllModes) {
    auto fx = reftest::load_fixture("plain");
    for (Mode m : {Mode::Restart, Mode::Vanilla, Mode::Reset}) {
        auto r = fx.run(m);
        bool any = false;
        for (const auto& [id, e] : r.statuses) {
            if (e.status == ValidationStatus::Plausible) {
                any = true;
                EXPECT_EQ(e.tests_executed, fx.suite.tests.size());
                EXPECT_FALSE(e.failing_test);
            }
        }
        EXPECT_TRUE(any) << to_string(m);
    }
}

TEST(Validate, StaticFieldPollutionScenario) {
    auto fx = reftest::load_fixture("fig2_static_field");
    auto restart = fx.run(Mode::Restart);
    auto vanilla = fx.run(Mode::Vanilla);
    auto reset = fx.run(Mode::Reset);
    EXPECT_EQ(restart.statuses.at("P4").status, ValidationStatus::Plausible);
    EXPECT_EQ(reset.statuses.at("P4").status, ValidationStatus::Plausible);
    EXPECT_EQ(vanilla.statuses.at("P4").status, ValidationStatus::NonPlausible);
    EXPECT_EQ(reset.statuses, restart.statuses);
}

TEST(Validate, RegistryWriteAbsentForNextPatch) {
    auto fx = reftest::load_fixture("registry_pollution");
    auto restart = fx.run(Mode::Restart);
    auto reset = fx.run(Mode::Reset);
    auto vanilla = fx.run(Mode::Vanilla);
    EXPECT_EQ(reset.statuses, restart.statuses);
    EXPECT_NE(vanilla.statuses, restart.statuses);
}

TEST(Validate, CrashAndTimeoutIsolation) {
    auto fx = reftest::load_fixture("error_isolation");
    ASSERT_EQ(fx.pool.size(), 5u);
    for (Mode m : {Mode::Vanilla, Mode::Reset}) {
        auto r = fx.run(m);
        std::vector<ValidationStatus> got;
        for (const auto& p : fx.pool) got.push_back(r.statuses.at(p.id).status);
        EXPECT_EQ(got[1], ValidationStatus::UnknownError) << to_string(m);
        EXPECT_EQ(got[3], ValidationStatus::Timeout) << to_string(m);
        for (std::size_t i : {0u, 2u, 4u}) EXPECT_FALSE(is_error(got[i]) || got[i] == ValidationStatus::Unknown);
        EXPECT_EQ(r.sessions_created, 3u) << to_string(m);
    }
    EXPECT_EQ(fx.run(Mode::Restart).sessions_created, 5u);
}

TEST(Validate, PoolViolationsAreUnknownErrors) {
    auto fx = reftest::load_fixture("plain");
    std::vector<PatchCandidate> pool;
    pool.push_back(PatchCandidate{"a-malformed", {}, std::string("line 1: bad")});
    pool.push_back(PatchCandidate{"b-unknown", {parse_class("class Nope { }")}, std::nullopt});
    ClassDef grown = fx.classpath.front();
    grown.fields.push_back(FieldDef{"extra_field", MemberKind::Static, FieldType::Int, false, std::nullopt});
    pool.push_back(PatchCandidate{"c-layout", {grown}, std::nullopt});
    ClassDef marked = fx.classpath.front();
    marked.instrumented = true;
    pool.push_back(PatchCandidate{"d-instrumented", {marked}, std::nullopt});
    pool.push_back(PatchCandidate{"e-noop", {fx.classpath.front()}, std::nullopt});
    for (Mode m : {Mode::Restart, Mode::Vanilla, Mode::Reset}) {
        auto r = validate_pool(fx.classpath, fx.suite.tests, pool, fx.config(m));
        for (const char* id : {"a-malformed", "b-unknown", "c-layout", "d-instrumented"}) {
            EXPECT_EQ(r.statuses.at(id).status, ValidationStatus::UnknownError) << id << " " << to_string(m);
            EXPECT_EQ(r.statuses.at(id).tests_executed, 0u);
        }
        EXPECT_NE(r.statuses.at("e-noop").status, ValidationStatus::UnknownError);
        EXPECT_LE(r.sessions_created, 1u);
    }
}

TEST(Validate, UnknownFailingTestRejected) {
    auto fx = reftest::load_fixture("plain");
    RunConfig cfg = fx.config(Mode::Reset);
    cfg.failing_tests = ids({"Nope.test"});
    EXPECT_THROW(validate_pool(fx.classpath, fx.suite.tests, fx.pool, cfg), UnknownTestError);
}

TEST(Validate, FixturesMatchCommittedOracle) {
    for (const auto& name : reftest::fixture_names()) {
        auto fx = reftest::load_fixture(name);
        auto expected = load_report(fx.dir / "expected.restart.report");
        EXPECT_EQ(fx.run(Mode::Restart).statuses, expected.status_map()) << name;
    }
}

// Property batteries over generated corpora: termination, short-circuit,
// restart economy and swap hygiene.
class GeneratedCorpora : public ::testing::TestWithParam<Mode> {};

TEST_P(GeneratedCorpora, Invariants) {
    const Mode mode = GetParam();
    for (std::uint64_t seed = 1; seed <= 200; seed += (mode == Mode::Restart ? 3 : 1)) {
        GeneratorConfig g;
        g.seed = seed;
        g.classes = 1 + static_cast<int>(seed % 6);
        g.patches = 5 + static_cast<int>(seed % 26);
        g.pollution_rate = static_cast<double>(seed % 5) / 4.0;
        Corpus corpus = generate_corpus(g);

        RunConfig cfg;
        cfg.mode = mode;
        cfg.failing_tests = corpus.suite.failing;
        const auto ordered = order_tests(corpus.suite.tests, corpus.suite.failing);

        std::vector<ClassDef> reference = corpus.classpath;
        if (mode == Mode::Reset) reference = transform_all(corpus.classpath, analyze(corpus.classpath));
        std::sort(reference.begin(), reference.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
        std::size_t hygiene_checks = 0;
        if (mode != Mode::Restart) {
            cfg.after_patch = [&](const std::string& id, const VmSession& s) {
                ++hygiene_checks;
                ASSERT_EQ(s.class_table(), reference) << "seed " << seed << " after " << id;
            };
        }

        auto r = validate_pool(corpus.classpath, corpus.suite.tests, corpus.pool, cfg);
        ASSERT_EQ(r.statuses.size(), corpus.pool.size());
        for (const auto& [id, e] : r.statuses) {
            SCOPED_TRACE("seed " + std::to_string(seed) + " " + id);
            ASSERT_NE(e.status, ValidationStatus::Unknown);
            if (e.status == ValidationStatus::Plausible) ASSERT_EQ(e.tests_executed, ordered.size());
            if (e.status == ValidationStatus::NonPlausible) {
                ASSERT_TRUE(e.failing_test);
                ASSERT_EQ(e.tests_executed, position(ordered, *e.failing_test));
            }
        }
        if (mode == Mode::Restart) {
            ASSERT_EQ(r.sessions_created, corpus.pool.size());
        } else {
            // Errors abandon the session; a fresh one is needed only while
            // patches remain.
            std::size_t errors = error_count(r.statuses);
            const bool last_errored = is_error(r.statuses.at(corpus.pool.back().id).status);
            ASSERT_EQ(r.sessions_created, 1 + errors - (last_errored ? 1 : 0)) << "seed " << seed;
            ASSERT_GT(hygiene_checks, 0u);
        }
    }
}

INSTANTIATE_TEST_SUITE_P(AllModes, GeneratedCorpora, ::testing::Values(Mode::Restart, Mode::Vanilla, Mode::Reset),
                         [](const auto& info) { return std::string(to_string(info.param)); });

TEST(Validate, PollutionFreeCorporaAgreeAcrossModes) {
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        GeneratorConfig g;
        g.seed = seed;
        g.classes = 4;
        g.patches = 20;
        g.pollution_rate = 0.0;
        Corpus c = generate_corpus(g);
        RunConfig cfg;
        cfg.failing_tests = c.suite.failing;
        cfg.mode = Mode::Restart;
        auto restart = validate_pool(c.classpath, c.suite.tests, c.pool, cfg);
        cfg.mode = Mode::Vanilla;
        auto vanilla = validate_pool(c.classpath, c.suite.tests, c.pool, cfg);
        EXPECT_EQ(vanilla.statuses, restart.statuses) << "seed " << seed;
    }
}
