#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

#include "patchvm/corpus.hpp"
#include "patchvm/report.hpp"

namespace patchvm {
namespace fs = std::filesystem;

namespace {

// Standard distributions are implementation-defined; corpora must be
// identical across toolchains, so draws are derived from raw engine output.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }
    std::int64_t range(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo + 1)));
    }
    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    bool chance(double p) { return unit() < p; }

private:
    std::mt19937_64 engine_;
};

struct Lib {
    std::string name;
    std::int64_t size;
    std::int64_t mult;
    std::int64_t checksum() const { return (size - 1) * mult + size; }
};

struct State {
    std::string name;
    std::int64_t base;
    std::int64_t seed_item;
    int lib_dep = -1;  // initializer adds Lib.lookup(0)
    std::int64_t initial = 0;
};

class Code {
public:
    Code& operator<<(const std::string& line) {
        out_ += "    " + line + "\n";
        return *this;
    }
    std::string str() const { return out_; }

private:
    std::string out_;
};

std::string header(const std::string& name, const std::optional<std::string>& super) {
    return "class " + name + (super ? " extends " + *super : "") + " {\n";
}

std::string n(std::int64_t v) { return std::to_string(v); }

std::string lib_text(const Lib& lib, const std::optional<std::string>& super) {
    const std::string& L = lib.name;
    Code init;
    init << "listnew" << "store 0" << "const 0" << "store 1" << "label fill" << "load 1"
         << "getstatic " + L + ".SIZE" << "lt" << "not" << "jumpif done" << "load 0" << "load 1" << "load 1"
         << "const " + n(lib.mult) << "mul" << "listput" << "load 1" << "const 1" << "add" << "store 1"
         << "jump fill" << "label done" << "load 0" << "const " + n(lib.size - 1) << "listget" << "load 0"
         << "listlen" << "add" << "putstatic " + L + ".CHECKSUM" << "return";
    Code lookup;
    lookup << "getstatic " + L + ".CHECKSUM" << "load 0" << "add" << "returnval";
    return header(L, super) + "  static final int SIZE = " + n(lib.size) + "\n  static final int CHECKSUM\n" +
           "  init {\n" + init.str() + "  }\n  static fn lookup(1) {\n" + lookup.str() + "  }\n}\n";
}

std::string state_text(const State& st, const std::vector<Lib>& libs, const std::optional<std::string>& super) {
    const std::string& S = st.name;
    Code init;
    init << "getstatic " + S + ".BASE";
    if (st.lib_dep >= 0) init << "const 0" << "invokestatic " + libs[st.lib_dep].name + ".lookup" << "add";
    init << "putstatic " + S + ".counter" << "listnew" << "putstatic " + S + ".table" << "getstatic " + S + ".table"
         << "const 0" << "const " + n(st.seed_item) << "listput";
    Code count, size, bump, push, peek;
    count << "getstatic " + S + ".counter" << "returnval";
    size << "getstatic " + S + ".table" << "listlen" << "returnval";
    bump << "getstatic " + S + ".counter" << "const 1" << "add" << "putstatic " + S + ".counter" << "return";
    push << "getstatic " + S + ".table" << "getstatic " + S + ".table" << "listlen" << "load 0" << "listput"
         << "return";
    peek << "getstatic " + S + ".counter" << "returnval";
    return header(S, super) + "  static int counter\n  static final ref table\n  static final int BASE = " +
           n(st.base) + "\n  init {\n" + init.str() + "  }\n  static fn count(0) {\n" + count.str() +
           "  }\n  static fn size(0) {\n" + size.str() + "  }\n  static fn bump(0) {\n" + bump.str() +
           "  }\n  static fn push(1) {\n" + push.str() + "  }\n  fn peek(0) {\n" + peek.str() + "  }\n}\n";
}

std::string linear(std::int64_t a, std::int64_t b) {
    Code c;
    c << "load 0" << "const " + n(a) << "mul" << "const " + n(b) << "add" << "returnval";
    return c.str();
}

std::string target_text(const std::string& fix_body) {
    Code twice;
    twice << "load 0" << "invokestatic Target.fix" << "const 2" << "mul" << "returnval";
    return "class Target {\n  static fn fix(1) {\n" + fix_body + "  }\n  static fn twice(1) {\n" + twice.str() +
           "  }\n}\n";
}

ClassDef parse_generated(const std::string& text) {
    try {
        return parse_class(text);
    } catch (const Error& e) {
        throw std::logic_error(std::string("generator produced an invalid class: ") + e.what() + "\n" + text);
    }
}

}  // namespace

Corpus generate_corpus(const GeneratorConfig& cfg) {
    if (cfg.classes < 1) throw ConfigError("--classes must be at least 1");
    if (cfg.patches < 1) throw ConfigError("--patches must be at least 1");
    if (!(cfg.pollution_rate >= 0.0 && cfg.pollution_rate <= 1.0)) {
        throw ConfigError("--pollution-rate must be within [0, 1]");
    }
    Rng rng(cfg.seed);
    Corpus corpus;

    std::vector<Lib> libs;
    std::vector<State> states;
    std::vector<std::string> names;
    std::vector<std::optional<std::string>> supers;
    std::vector<bool> is_lib;
    for (int i = 0; i < cfg.classes; ++i) {
        const bool lib = i % 2 == 0;
        std::string name = lib ? "Lib" + n(static_cast<std::int64_t>(libs.size()))
                               : "State" + n(static_cast<std::int64_t>(states.size()));
        std::optional<std::string> super;
        if (i > 0 && rng.chance(0.3)) super = names[rng.below(static_cast<std::uint64_t>(i))];
        if (lib) {
            libs.push_back(Lib{name, 1000 + rng.range(0, 200), rng.range(2, 9)});
        } else {
            State st{name, rng.range(1, 50), rng.range(100, 999)};
            if (!libs.empty() && rng.chance(0.5)) st.lib_dep = static_cast<int>(rng.below(libs.size()));
            st.initial = st.base + (st.lib_dep >= 0 ? libs[st.lib_dep].checksum() : 0);
            states.push_back(st);
        }
        names.push_back(name);
        supers.push_back(super);
        is_lib.push_back(lib);
    }
    for (std::size_t i = 0, li = 0, si = 0; i < names.size(); ++i) {
        std::string text = is_lib[i] ? lib_text(libs[li++], supers[i]) : state_text(states[si++], libs, supers[i]);
        corpus.classpath.push_back(parse_generated(text));
    }

    const std::int64_t a = rng.range(2, 9);
    const std::int64_t b = rng.range(1, 20);
    std::int64_t a_bug = rng.range(2, 9);
    if (a_bug == a) a_bug = a + 1;
    corpus.classpath.push_back(parse_generated(target_text(linear(a_bug, b))));

    // Tests.
    struct Test {
        std::string name;
        std::string body;
    };
    std::vector<Test> tests;
    auto expect = [](const std::string& call_prefix, std::int64_t want) {
        Code c;
        std::istringstream lines(call_prefix);
        for (std::string l; std::getline(lines, l);) c << l;
        c << "const " + n(want) << "eq" << "assert" << "return";
        return c.str();
    };
    // An undeclared tTwice must pass on the buggy original, so it probes the
    // point where the buggy and the correct fix agree.
    const bool twice_fails = rng.chance(0.5);
    const std::int64_t x1 = rng.range(1, 30);
    const std::int64_t x2 = twice_fails ? rng.range(1, 30) : 0;
    tests.push_back({"tBug", expect("const " + n(x1) + "\ninvokestatic Target.fix", a * x1 + b)});
    tests.push_back({"tTwice", expect("const " + n(x2) + "\ninvokestatic Target.twice", 2 * (a * x2 + b))});
    tests.push_back({"tZero", expect("const 0\ninvokestatic Target.fix", b)});
    for (const auto& lib : libs) {
        tests.push_back({"t" + lib.name, expect("const 5\ninvokestatic " + lib.name + ".lookup", lib.checksum() + 5)});
    }
    for (const auto& st : states) {
        Code c;
        c << "invokestatic " + st.name + ".count" << "const " + n(st.initial) << "eq" << "assert"
          << "invokestatic " + st.name + ".size" << "const 1" << "eq" << "assert" << "return";
        tests.push_back({"t" + st.name, c.str()});
        tests.push_back({"tPeek" + st.name, expect("new " + st.name + "\ninvokevirtual peek", st.initial)});
    }
    {
        Code c;
        c << "const \"gen.key\"" << "sysget" << "const \"\"" << "eq" << "assert" << "return";
        tests.push_back({"tRegistry", c.str()});
        Code e;
        e << "const " + n(x1) << "invokestatic Target.fix" << "emit" << "return";
        tests.push_back({"tEmit", e.str()});
    }
    // Shuffle everything except the leading failing test.
    for (std::size_t i = tests.size() - 1; i > 1; --i) {
        std::swap(tests[i], tests[1 + rng.below(i)]);
    }
    std::string suite_text = "class Suite {\n";
    for (const auto& t : tests) {
        suite_text += "  static fn " + t.name + "(0) {\n" + t.body + "  }\n";
        TestId id{"Suite", t.name};
        corpus.suite.tests.push_back(id);
        if (t.name == "tBug" || (twice_fails && t.name == "tTwice")) corpus.suite.failing.push_back(id);
    }
    suite_text += "}\n";
    corpus.classpath.push_back(parse_generated(suite_text));

    // Patches.
    const int width = std::max<int>(3, static_cast<int>(n(cfg.patches).size()));
    for (int p = 1; p <= cfg.patches; ++p) {
        std::string id = n(p);
        id = "patch-" + std::string(static_cast<std::size_t>(width) - id.size(), '0') + id;
        std::int64_t a_wrong = rng.range(2, 12);
        while (a_wrong == a || a_wrong == a_bug) ++a_wrong;
        Code body;
        if (rng.chance(cfg.pollution_rate)) {
            const std::uint64_t kinds = states.empty() ? 1 : 3;
            switch (rng.below(kinds)) {
                case 0: body << "const \"gen.key\"" << "const \"dirty\"" << "sysset"; break;
                case 1: body << "invokestatic " + states[rng.below(states.size())].name + ".bump"; break;
                default:
                    body << "const " + n(rng.range(1, 99)) << "invokestatic " + states[rng.below(states.size())].name + ".push";
                    break;
            }
            std::string rest = linear(rng.chance(0.6) ? a : a_wrong, b);
            corpus.pool.push_back(PatchCandidate{id, {parse_generated(target_text(body.str() + rest))}, std::nullopt});
            continue;
        }
        const double r = rng.unit();
        std::string text;
        if (r < 0.27) {
            text = linear(a, b);
        } else if (r < 0.62) {
            text = linear(a_wrong, b);
        } else if (r < 0.84) {
            body << "load 0" << "const 0" << "eq" << "jumpif zero" << "load 0" << "const " + n(a) << "mul"
                 << "const " + n(b) << "add" << "returnval" << "label zero" << "const " + n(b + 1) << "returnval";
            text = body.str();
        } else if (r < 0.93) {
            body << "throw \"patch exploded\"" << "const 0" << "returnval";
            text = body.str();
        } else if (r < 0.95) {
            body << "label spin" << "jump spin" << "const 0" << "returnval";
            text = body.str();
        } else if (r < 0.98) {
            body << "crashvm" << "const 0" << "returnval";
            text = body.str();
        } else {
            body << "label grow" << "listnew" << "store 1" << "jump grow" << "const 0" << "returnval";
            text = body.str();
        }
        corpus.pool.push_back(PatchCandidate{id, {parse_generated(target_text(text))}, std::nullopt});
    }
    return corpus;
}

std::string render_manifest(const TestSuite& suite) {
    std::string out;
    for (const auto& t : suite.tests) {
        const bool failing = std::find(suite.failing.begin(), suite.failing.end(), t) != suite.failing.end();
        out += (failing ? "failing: " : "") + t.str() + "\n";
    }
    return out;
}

namespace {

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out || !(out << text)) throw ConfigError("cannot write " + p.string());
}

}  // namespace

void write_corpus(const Corpus& corpus, const fs::path& dir) {
    std::error_code ec;
    if (fs::exists(dir / "classpath", ec) || fs::exists(dir / "patches-pool", ec)) {
        throw ConfigError("output directory " + dir.string() + " already holds a corpus");
    }
    fs::create_directories(dir / "classpath", ec);
    fs::create_directories(dir / "patches-pool", ec);
    if (ec) throw ConfigError("cannot create " + dir.string() + ": " + ec.message());
    for (const auto& c : corpus.classpath) write_text(dir / "classpath" / (c.name + ".cls"), serialize_class(c));
    write_text(dir / "tests.manifest", render_manifest(corpus.suite));
    for (const auto& p : corpus.pool) {
        fs::path pd = dir / "patches-pool" / p.id;
        fs::create_directories(pd, ec);
        if (ec) throw ConfigError("cannot create " + pd.string());
        for (const auto& c : p.classes) write_text(pd / (c.name + ".cls"), serialize_class(c));
    }
}

Corpus load_corpus(const fs::path& dir, std::vector<std::string>* warnings) {
    Corpus c;
    c.classpath = load_classpath(dir / "classpath");
    c.suite = load_manifest(dir / "tests.manifest");
    PoolLoad pool = load_patch_pool(dir / "patches-pool");
    c.pool = std::move(pool.candidates);
    if (warnings) *warnings = std::move(pool.warnings);
    return c;
}

void generate_pool(const GeneratorConfig& cfg, const fs::path& dir) { write_corpus(generate_corpus(cfg), dir); }

}  // namespace patchvm
