#include <algorithm>
#include <fstream>
#include <sstream>

#include "patchvm/report.hpp"

namespace patchvm {
namespace fs = std::filesystem;

namespace {

std::string read_text(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + p.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<fs::path> class_files(const fs::path& dir) {
    std::vector<fs::path> out;
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(dir, ec)) {
        if (entry.is_regular_file() && entry.path().extension() == ".cls") out.push_back(entry.path());
    }
    if (ec) throw ConfigError("cannot list " + dir.string() + ": " + ec.message());
    std::sort(out.begin(), out.end());
    return out;
}

void require_dir(const fs::path& dir, const char* what) {
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) throw ConfigError(std::string(what) + " directory not found: " + dir.string());
}

}  // namespace

std::vector<ClassDef> load_classpath(const fs::path& dir) {
    require_dir(dir, "classpath");
    std::vector<ClassDef> out;
    for (const auto& file : class_files(dir)) {
        try {
            out.push_back(parse_class(read_text(file)));
        } catch (const ParseError& e) {
            throw ConfigError(file.string() + ": " + e.what());
        } catch (const VerifyError& e) {
            throw ConfigError(file.string() + ": " + e.what());
        }
    }
    return out;
}

PoolLoad load_patch_pool(const fs::path& dir) {
    require_dir(dir, "patch pool");
    PoolLoad load;
    std::vector<fs::path> patch_dirs;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_directory()) patch_dirs.push_back(entry.path());
    }
    std::sort(patch_dirs.begin(), patch_dirs.end());
    for (const auto& pd : patch_dirs) {
        PatchCandidate cand;
        cand.id = pd.filename().string();
        for (const auto& file : class_files(pd)) {
            try {
                cand.classes.push_back(parse_class(read_text(file)));
            } catch (const ParseError& e) {
                cand.malformed = file.filename().string() + ": " + e.what();
            } catch (const VerifyError& e) {
                cand.malformed = file.filename().string() + ": " + e.what();
            }
            if (cand.malformed) break;
        }
        if (cand.malformed) {
            cand.classes.clear();
            load.warnings.push_back("malformed patch " + cand.id + " (" + *cand.malformed + ")");
        } else if (cand.classes.empty()) {
            load.warnings.push_back("patch " + cand.id + " contains no class files");
        }
        load.candidates.push_back(std::move(cand));
    }
    if (load.candidates.empty()) load.warnings.push_back("patch pool " + dir.string() + " is empty");
    return load;
}

std::string corpus_digest(std::span<const ClassDef> classpath, const TestSuite& suite,
                          std::span<const PatchCandidate> pool) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto feed = [&h](std::string_view s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        h ^= 0xff;  // field separator
        h *= 0x100000001b3ULL;
    };
    std::vector<const ClassDef*> sorted;
    for (const auto& c : classpath) sorted.push_back(&c);
    std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->name < b->name; });
    feed("classpath");
    for (const auto* c : sorted) feed(serialize_class(*c));
    feed("tests");
    for (const auto& t : suite.tests) feed(t.str());
    feed("failing");
    for (const auto& t : suite.failing) feed(t.str());
    feed("pool");
    for (const auto& p : pool) {
        feed(p.id);
        if (p.malformed) feed("malformed:" + *p.malformed);
        for (const auto& c : p.classes) feed(serialize_class(c));
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace patchvm
