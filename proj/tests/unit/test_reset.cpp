#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "patchvm/corpus.hpp"
#include "patchvm/hotswap.hpp"
#include "patchvm/pollution.hpp"
#include "patchvm/reset.hpp"
#include "properties.hpp"
#include "random_program.hpp"

using namespace patchvm;

namespace {

std::vector<ClassDef> parse_all(std::initializer_list<std::string_view> sources) {
    std::vector<ClassDef> out;
    for (auto s : sources) out.push_back(parse_class(s));
    return out;
}

const MethodDef& method(const ClassDef& c, std::string_view name) {
    const MethodDef* m = c.find_method(name);
    if (!m) throw std::runtime_error("missing method " + std::string(name));
    return *m;
}

// A counter class whose initializer emits, plus a test that bumps it.
std::vector<ClassDef> counter_program() {
    return transform_all(parse_all({R"(class Counter {
  static int n
  init { const "init"; emit; const 10; putstatic Counter.n }
})",
                                    R"(class T {
  static fn bump(0) { getstatic Counter.n; const 1; add; putstatic Counter.n; getstatic Counter.n; emit; return }
})"}),
                         analyze(parse_all({"class Counter { static int n\n init { const 1\n putstatic Counter.n } }"})));
}

// Outside the relocated initializer no write to a formerly final field may
// appear that was not already in the original body.
void audit_final_stripping(const std::vector<ClassDef>& original, const std::vector<ClassDef>& transformed) {
    std::set<std::pair<std::string, std::string>> finals;
    for (const auto& c : original)
        for (const auto& f : c.fields)
            if (f.is_static() && f.is_final && !f.constant_value) finals.insert({c.name, f.name});
    auto writes = [&](const MethodDef& m) {
        std::multiset<std::pair<std::string, std::string>> out;
        for (const auto& in : m.body)
            if (in.op == Op::PutStatic && finals.count({in.owner, in.member})) out.insert({in.owner, in.member});
        return out;
    };
    for (std::size_t k = 0; k < original.size(); ++k) {
        for (const auto& tm : transformed[k].methods) {
            if (tm.name == kRenamedClinitName) continue;
            const MethodDef* om = original[k].find_method(tm.name);
            std::multiset<std::pair<std::string, std::string>> before;
            if (om && !om->is_clinit()) before = writes(*om);
            ASSERT_EQ(writes(tm), before) << original[k].name << "." << tm.name;
        }
    }
}

}  // namespace

TEST(Transform, InitializerRelocated) {
    auto cp = parse_all({"class C { static int f\n init { const 1\n putstatic C.f }\n static fn m(0) { return } }"});
    auto report = analyze(cp);
    ClassDef t = transform(cp[0], report);
    EXPECT_TRUE(t.instrumented);
    const MethodDef& clinit = method(t, kClinitName);
    ASSERT_EQ(clinit.body.size(), 1u);
    EXPECT_EQ(clinit.body[0].op, Op::Guard);
    EXPECT_EQ(clinit.body[0].owner, "C");
    const MethodDef& moved = method(t, kRenamedClinitName);
    EXPECT_TRUE(moved.is_static());
    EXPECT_EQ(moved.params, 0);
    EXPECT_EQ(t.methods.back().name, kRenamedClinitName);
    // Original body, with its own trigger guarded.
    EXPECT_EQ(moved.body.size(), 3u);
}

TEST(Transform, FlaggedClassWithoutInitializerGetsEmptyOne) {
    auto cp = parse_all({"class C { static int f }"});
    ClassDef t = transform(cp[0], analyze(cp));
    EXPECT_TRUE(method(t, kRenamedClinitName).body.empty());
}

TEST(Transform, FinalStrippedOnFlaggedReference) {
    auto cp = parse_all({"class C { static final ref cache\n static final int K = 4 }"});
    ClassDef t = transform(cp[0], analyze(cp));
    EXPECT_FALSE(t.find_field("cache")->is_final);
    EXPECT_TRUE(t.find_field("K")->is_final);
}

TEST(Transform, GuardBeforeNonConstantRead) {
    auto cp = parse_all({"class D { static int x\n static final int K = 1 }",
                         "class U { static fn m(0) { getstatic D.x\n getstatic D.K\n add\n returnval } }"});
    auto report = analyze(cp);
    ClassDef u = transform(cp[1], report);
    const auto& body = method(u, "m").body;
    ASSERT_EQ(body.size(), 5u);
    EXPECT_EQ(body[0], make_class_op(Op::Guard, "D"));
    EXPECT_EQ(body[1].op, Op::GetStatic);
    EXPECT_EQ(body[2].op, Op::GetStatic);
    EXPECT_EQ(body[2].member, "K");
}

TEST(Transform, UnflaggedClassesOnlyMarked) {
    auto cp = parse_all({"class P { static final int K = 1\n static fn m(0) { return } }"});
    ClassDef t = transform(cp[0], analyze(cp));
    ClassDef expected = cp[0];
    expected.instrumented = true;
    EXPECT_EQ(t, expected);
}

TEST(Transform, SecondTransformRejected) {
    auto cp = parse_all({"class C { static int f }"});
    auto report = analyze(cp);
    ClassDef once = transform(cp[0], report);
    EXPECT_THROW(transform(once, report), AlreadyTransformedError);
}

TEST(EpochReset, ReinitRunsOncePerEpoch) {
    auto cp = counter_program();
    VmSession s(cp);
    EXPECT_TRUE(ensure_reinit(s, "Counter").passed());
    EXPECT_TRUE(s.epoch().flag("Counter"));
    EXPECT_TRUE(ensure_reinit(s, "Counter").passed());
    EXPECT_EQ(s.emit_log(), std::vector<std::string>{"init"});
    EXPECT_EQ(s.epoch().reinit_trace, std::vector<std::string>{"Counter"});
}

TEST(EpochReset, ResetRerunsInitializerOnNextTrigger) {
    auto cp = counter_program();
    VmSession s(cp);
    TestId bump{"T", "bump"};
    s.run_test(bump);
    s.run_test(bump);
    reset_epoch(s);
    EXPECT_FALSE(s.epoch().flag("Counter"));
    s.run_test(bump);
    EXPECT_EQ(s.emit_log(), (std::vector<std::string>{"init", "11", "12", "init", "11"}));
}

TEST(EpochReset, ResetTwiceEqualsResetOnce) {
    auto cp = counter_program();
    VmSession once(cp), twice(cp);
    TestId bump{"T", "bump"};
    for (auto* s : {&once, &twice}) {
        s->run_test(bump);
        reset_epoch(*s);
    }
    reset_epoch(twice);
    once.run_test(bump);
    twice.run_test(bump);
    EXPECT_EQ(once.emit_log(), twice.emit_log());
    EXPECT_EQ(once.static_store(), twice.static_store());
    EXPECT_EQ(once.epoch().reinit_flags, twice.epoch().reinit_flags);
}

TEST(EpochReset, RegistryCleared) {
    auto cp = transform_all(parse_all({"class T { static fn w(0) { const \"k\"\n const \"v\"\n sysset\n return } }"}),
                            PollutionReport{});
    VmSession s(cp);
    s.run_test(TestId{"T", "w"});
    EXPECT_EQ(s.registry().size(), 1u);
    reset_epoch(s);
    EXPECT_TRUE(s.registry().empty());
}

TEST(EpochReset, HookRunsLastAndFailuresAreHarnessErrors) {
    auto cp = transform_all(parse_all({R"(class H {
  static fn setup(0) { const "k"; const "hook"; sysset; return }
  static fn broken(0) { const false; assert; return }
})"}),
                            PollutionReport{});
    VmSession s(cp);
    s.epoch().custom_hook = TestId{"H", "setup"};
    reset_epoch(s);
    EXPECT_EQ(s.registry().at("k"), "hook");
    s.epoch().custom_hook = TestId{"H", "broken"};
    EXPECT_THROW(reset_epoch(s), HarnessError);
}

TEST(EpochReset, DeadSessionRejected) {
    auto cp = transform_all(parse_all({"class T { static fn boom(0) { crashvm } }"}), PollutionReport{});
    VmSession s(cp);
    s.run_test(TestId{"T", "boom"});
    EXPECT_THROW(reset_epoch(s), DeadSession);
}

TEST(EpochReset, FieldDependencyFixtureSurvivesReset) {
    auto fx = reftest::load_fixture("fig3_field_dependency");
    auto cp = transform_all(fx.classpath, analyze(fx.classpath));
    VmSession s(cp);
    for (int epoch = 0; epoch < 3; ++epoch) {
        for (const auto& t : fx.suite.tests) {
            auto o = s.run_test(t);
            const bool known_failing =
                std::find(fx.suite.failing.begin(), fx.suite.failing.end(), t) != fx.suite.failing.end();
            if (!known_failing) EXPECT_TRUE(o.passed()) << t.str() << " epoch " << epoch << ": " << o.detail;
        }
        reset_epoch(s);
    }
}

// Within each epoch the relocated initializers run in exactly the order a
// fresh session initializes the same classes.
TEST(EpochReset, OrderFidelityAgainstFreshSession) {
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        auto prog = reftest::random_program(seed);
        auto report = analyze(prog.classes);
        auto cp = transform_all(prog.classes, report);
        VmSession reused(cp);
        for (int epoch = 0; epoch < 3; ++epoch) {
            VmSession fresh(prog.classes);
            for (const auto& t : prog.tests) {
                auto a = reused.run_test(t, Budgets{20'000, 100'000});
                auto b = fresh.run_test(t, Budgets{20'000, 100'000});
                ASSERT_EQ(a.verdict, b.verdict) << "seed " << seed << " epoch " << epoch << " " << t.str();
            }
            std::vector<std::string> expected;
            for (const auto& c : fresh.ledger().order_trace)
                if (report.is_flagged(c)) expected.push_back(c);
            ASSERT_EQ(reused.epoch().reinit_trace, expected) << "seed " << seed << " epoch " << epoch;
            reset_epoch(reused);
        }
    }
}

TEST(EpochReset, EagerModeBreaksInitializerDependency) {
    auto fx = reftest::load_fixture("fig4_initializer_dependency");
    auto lazy = fx.run(Mode::Reset);
    auto restart = fx.run(Mode::Restart);
    EXPECT_EQ(lazy.statuses, restart.statuses);

    RunConfig cfg = fx.config(Mode::Reset);
    cfg.eager_reinit = true;
    auto eager = validate_pool(fx.classpath, fx.suite.tests, fx.pool, cfg);
    int broken = 0;
    for (const auto& [id, entry] : eager.statuses) {
        if (entry != restart.statuses.at(id)) {
            ++broken;
            EXPECT_EQ(entry.status, ValidationStatus::NonPlausible) << id;
            ASSERT_TRUE(entry.failing_test);
            EXPECT_EQ(entry.failing_test->method, "testUTC") << id;
        }
    }
    EXPECT_GT(broken, 0);
}

TEST(ResetProperty, GuardCompleteness) {
    auto check = [](const std::vector<ClassDef>& classes) {
        auto report = analyze(classes);
        EXPECT_EQ(reftest::check_guards(transform_all(classes, report), report), "");
    };
    for (const auto& name : reftest::fixture_names()) check(reftest::load_fixture(name).classpath);
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
        GeneratorConfig cfg;
        cfg.seed = seed;
        cfg.classes = 1 + static_cast<int>(seed % 6);
        cfg.patches = 10;
        Corpus corpus = generate_corpus(cfg);
        auto report = analyze(corpus.classpath);
        ASSERT_EQ(reftest::check_guards(transform_all(corpus.classpath, report), report), "") << "seed " << seed;
        for (const auto& p : corpus.pool) {
            ASSERT_EQ(reftest::check_guards(transform_all(p.classes, report), report), "") << "seed " << seed;
        }
        check(reftest::random_program(seed).classes);
    }
}

TEST(ResetProperty, FinalStrippingContainment) {
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
        auto prog = reftest::random_program(seed);
        audit_final_stripping(prog.classes, transform_all(prog.classes, analyze(prog.classes)));
    }
    for (const auto& name : reftest::fixture_names()) {
        auto cp = reftest::load_fixture(name).classpath;
        audit_final_stripping(cp, transform_all(cp, analyze(cp)));
    }
}
