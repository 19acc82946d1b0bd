#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "patchvm/validator.hpp"

namespace patchvm {
namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

}  // namespace

std::string_view to_string(Mode m) {
    switch (m) {
        case Mode::Restart: return "restart";
        case Mode::Vanilla: return "vanilla";
        case Mode::Reset: return "reset";
    }
    return "?";
}

Mode parse_mode(std::string_view s) {
    const std::string l = lower(s);
    if (l == "restart") return Mode::Restart;
    if (l == "vanilla") return Mode::Vanilla;
    if (l == "reset") return Mode::Reset;
    throw ConfigError("unknown mode '" + std::string(s) + "' (expected restart, vanilla or reset)");
}

std::string_view to_string(ValidationStatus s) {
    switch (s) {
        case ValidationStatus::Plausible: return "PLAUSIBLE";
        case ValidationStatus::NonPlausible: return "NON_PLAUSIBLE";
        case ValidationStatus::Timeout: return "TIMEOUT";
        case ValidationStatus::MemoryError: return "MEMORY_ERROR";
        case ValidationStatus::UnknownError: return "UNKNOWN_ERROR";
        case ValidationStatus::Unknown: return "UNKNOWN";
    }
    return "?";
}

ValidationStatus parse_status(std::string_view s) {
    for (auto st : {ValidationStatus::Plausible, ValidationStatus::NonPlausible, ValidationStatus::Timeout,
                    ValidationStatus::MemoryError, ValidationStatus::UnknownError, ValidationStatus::Unknown}) {
        if (to_string(st) == s) return st;
    }
    throw ConfigError("unknown status '" + std::string(s) + "'");
}

bool is_error(ValidationStatus s) {
    return s == ValidationStatus::Timeout || s == ValidationStatus::MemoryError ||
           s == ValidationStatus::UnknownError;
}

TestSuite parse_manifest(std::string_view text) {
    TestSuite suite;
    std::set<TestId> seen;
    std::size_t line_no = 0;
    std::istringstream in{std::string(text)};
    for (std::string raw; std::getline(in, raw);) {
        ++line_no;
        std::string_view line = raw;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        bool failing = false;
        constexpr std::string_view kFailing = "failing:";
        if (line.substr(0, kFailing.size()) == kFailing) {
            failing = true;
            line = trim(line.substr(kFailing.size()));
        }
        TestId id;
        try {
            id = TestId::parse(line);
        } catch (const ConfigError& e) {
            throw ConfigError("manifest line " + std::to_string(line_no) + ": " + e.what());
        }
        if (!seen.insert(id).second) {
            throw ConfigError("manifest line " + std::to_string(line_no) + ": duplicate test " + id.str());
        }
        suite.tests.push_back(id);
        if (failing) suite.failing.push_back(id);
    }
    return suite;
}

TestSuite load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read test manifest " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_manifest(buf.str());
}

std::vector<TestId> order_tests(std::span<const TestId> all, std::span<const TestId> failing) {
    std::set<TestId> failing_set;
    for (const auto& f : failing) {
        if (std::find(all.begin(), all.end(), f) == all.end()) {
            throw UnknownTestError("failing test " + f.str() + " is not part of the suite");
        }
        failing_set.insert(f);
    }
    std::vector<TestId> out;
    out.reserve(all.size());
    std::set<TestId> emitted;
    for (const auto& f : failing) {
        if (emitted.insert(f).second) out.push_back(f);
    }
    for (const auto& t : all) {
        if (!failing_set.count(t)) out.push_back(t);
    }
    return out;
}

}  // namespace patchvm
