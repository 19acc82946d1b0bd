#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "patchvm/classfile.hpp"
#include "patchvm/corpus.hpp"
#include "patchvm/pollution.hpp"
#include "patchvm/reset.hpp"
#include "random_program.hpp"

using namespace patchvm;

TEST(Classfile, EmptyClass) {
    ClassDef c = parse_class("class A { }");
    EXPECT_EQ(c.name, "A");
    EXPECT_TRUE(c.fields.empty());
    EXPECT_TRUE(c.methods.empty());
    EXPECT_FALSE(c.has_static_init());
    EXPECT_FALSE(c.superclass);
}

TEST(Classfile, ConstantVariable) {
    ClassDef c = parse_class("class A { static final int K = 3 }");
    ASSERT_EQ(c.fields.size(), 1u);
    const FieldDef& k = c.fields[0];
    EXPECT_EQ(k.name, "K");
    EXPECT_TRUE(k.is_final);
    EXPECT_TRUE(k.is_static());
    ASSERT_TRUE(k.constant_value);
    EXPECT_EQ(std::get<std::int64_t>(*k.constant_value), 3);
}

TEST(Classfile, TruncatedInputReportsLine) {
    try {
        parse_class("class A { static int");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 1u);
    }
}

TEST(Classfile, ParseErrorsCarryPosition) {
    try {
        parse_class("class A {\n  static fn m(0) {\n    bogus 1\n  }\n}\n");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
        EXPECT_GT(e.column(), 0u);
    }
}

TEST(Classfile, VerifyErrors) {
    EXPECT_THROW(parse_class("class A { static fn m(0) { add\n return } }"), VerifyError);
    EXPECT_THROW(parse_class("class A { static fn m(0) { jump Nowhere } }"), VerifyError);
    EXPECT_THROW(parse_class("class A { static int x\n static int x }"), VerifyError);
    EXPECT_THROW(parse_class("class A { static fn m(0) { return }\n static fn m(0) { return } }"), VerifyError);
}

TEST(Classfile, InitSerializesAsInitBlock) {
    ClassDef c = parse_class("class A { static int x\n init { const 1\n putstatic A.x } }");
    ASSERT_TRUE(c.has_static_init());
    const std::string text = serialize_class(c);
    EXPECT_NE(text.find("init {"), std::string::npos);
    EXPECT_EQ(parse_class(text), c);
}

TEST(Classfile, RoundTripEmpty) {
    ClassDef c = parse_class("class A { }");
    EXPECT_EQ(parse_class(serialize_class(c)), c);
}

TEST(Classfile, RoundTripAllLiteralKinds) {
    ClassDef c = parse_class(R"(class A extends B {
  static final float PI = 3.25
  static final string S = "a \"quoted\" \\ line\n"
  static final bool T = true
  final int inst
  static fn m(1) { const null; const -7; const 1.5e10; store 1; store 2; store 3; load 0; returnval }
})");
    EXPECT_EQ(parse_class(serialize_class(c)), c);
}

TEST(Classfile, LayoutSignatureIgnoresBodies) {
    ClassDef a = parse_class("class A { static int x\n static fn m(0) { const 1\n returnval } }");
    ClassDef b = parse_class("class A { static int x\n static fn m(0) { const 2\n returnval } }");
    EXPECT_EQ(layout_signature(a), layout_signature(b));
}

TEST(Classfile, LayoutSignatureSeesDeclarations) {
    ClassDef a = parse_class("class A { static int x\n static fn m(0) { return } }");
    ClassDef extra = parse_class("class A { static int x\n static int y\n static fn m(0) { return } }");
    ClassDef renamed = parse_class("class A { static int x\n static fn n(0) { return } }");
    EXPECT_NE(layout_signature(a), layout_signature(extra));
    EXPECT_NE(layout_signature(a), layout_signature(renamed));
}

// Round-trip battery: fixtures, generated corpora and random programs, each
// before and after the reset transform.
TEST(ClassfileProperty, RoundTripOverCorpora) {
    auto check = [](const std::vector<ClassDef>& classes) {
        const auto transformed = transform_all(classes, analyze(classes));
        for (const auto* set : {&classes, &transformed}) {
            for (const auto& c : *set) {
                ASSERT_EQ(parse_class(serialize_class(c)), c) << serialize_class(c);
                ASSERT_EQ(serialize_class(parse_class(serialize_class(c))), serialize_class(c));
            }
        }
    };
    for (const auto& name : reftest::fixture_names()) check(reftest::load_fixture(name).classpath);
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
        GeneratorConfig cfg;
        cfg.seed = seed;
        cfg.classes = 1 + static_cast<int>(seed % 6);
        cfg.patches = 3;
        Corpus corpus = generate_corpus(cfg);
        check(corpus.classpath);
        for (const auto& p : corpus.pool) check(p.classes);
        check(reftest::random_program(seed).classes);
    }
}

TEST(ClassfileProperty, SignatureStableUnderTransform) {
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        auto prog = reftest::random_program(seed);
        auto report = analyze(prog.classes);
        for (const auto& c : prog.classes) {
            auto t = transform(c, report);
            // Transformation changes declarations only by the added method
            // and dropped finals; bodies never affect the signature.
            ClassDef rewritten = t;
            for (auto& m : rewritten.methods) m.body.clear();
            EXPECT_EQ(layout_signature(rewritten), layout_signature(t));
        }
    }
}
