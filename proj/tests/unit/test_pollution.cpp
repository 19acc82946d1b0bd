#include <gtest/gtest.h>

#include "patchvm/pollution.hpp"

using namespace patchvm;

namespace {

PollutionReport analyze_sources(std::initializer_list<std::string_view> sources) {
    std::vector<ClassDef> classes;
    for (auto s : sources) classes.push_back(parse_class(s));
    return analyze(classes);
}

}  // namespace

TEST(Pollution, MutableStaticFlagged) {
    auto r = analyze_sources({"class C { static int f }"});
    EXPECT_TRUE(r.is_flagged("C"));
    EXPECT_TRUE(r.is_flagged("C", "f"));
    EXPECT_EQ(r.reasons.at({"C", "f"}), PollutionReason::MutableStatic);
}

TEST(Pollution, FinalReferenceFlagged) {
    auto r = analyze_sources({"class E { static final ref TABLE }"});
    EXPECT_TRUE(r.is_flagged("E", "TABLE"));
    EXPECT_EQ(r.reasons.at({"E", "TABLE"}), PollutionReason::FinalReference);
    EXPECT_EQ(to_string(PollutionReason::FinalReference), "FINAL_REFERENCE");
}

TEST(Pollution, ConstantsAndInstanceFieldsNeverFlagged) {
    auto r = analyze_sources({"class K { static final int MAX = 3\n static final string N = \"x\"\n int v\n ref r }"});
    EXPECT_FALSE(r.is_flagged("K"));
    EXPECT_TRUE(r.flagged_fields.empty());
    EXPECT_TRUE(r.is_constant("K", "MAX"));
    EXPECT_TRUE(r.is_constant("K", "N"));
}

TEST(Pollution, StaticFinalPrimitiveWithoutConstantIsNotFlagged) {
    // Written once by the initializer; the initializer re-runs anyway when
    // the class is flagged for another reason.
    auto r = analyze_sources({"class K { static final int computed }"});
    EXPECT_FALSE(r.is_flagged("K"));
}

TEST(Pollution, GuardTargetsIncludeSubclasses) {
    auto r = analyze_sources({"class Base { static int n }", "class Mid extends Base { }", "class Leaf extends Mid { }",
                              "class Other { }"});
    EXPECT_EQ(r.flagged_classes, std::set<std::string>{"Base"});
    EXPECT_EQ(r.guard_targets, (std::set<std::string>{"Base", "Leaf", "Mid"}));
    EXPECT_FALSE(r.is_guard_target("Other"));
}

TEST(Pollution, Deterministic) {
    auto a = analyze_sources({"class A { static int x }", "class B { static final ref y }"});
    auto b = analyze_sources({"class A { static int x }", "class B { static final ref y }"});
    EXPECT_EQ(a, b);
}
