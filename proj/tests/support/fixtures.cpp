#include "fixtures.hpp"

#include <algorithm>
#include <fstream>

#include "patchvm/report.hpp"

#ifndef PATCHVM_FIXTURE_DIR
#error "PATCHVM_FIXTURE_DIR must point at corpus/fixtures"
#endif

namespace reftest {

namespace fs = std::filesystem;

fs::path fixture_root() { return fs::path(PATCHVM_FIXTURE_DIR); }

std::vector<std::string> fixture_names() {
    std::vector<std::string> out;
    for (const auto& e : fs::directory_iterator(fixture_root()))
        if (e.is_directory()) out.push_back(e.path().filename().string());
    std::sort(out.begin(), out.end());
    return out;
}

Fixture load_fixture(const std::string& name) {
    Fixture f;
    f.name = name;
    f.dir = fixture_root() / name;
    f.classpath = patchvm::load_classpath(f.dir / "classpath");
    f.suite = patchvm::load_manifest(f.dir / "tests.manifest");
    f.pool = patchvm::load_patch_pool(f.dir / "patches-pool").candidates;
    if (std::ifstream hook{f.dir / "reset.hook"}) {
        std::string line;
        std::getline(hook, line);
        if (!line.empty()) f.reset_hook = patchvm::TestId::parse(line);
    }
    return f;
}

patchvm::RunConfig Fixture::config(patchvm::Mode mode) const {
    patchvm::RunConfig cfg;
    cfg.mode = mode;
    cfg.failing_tests = suite.failing;
    cfg.reset_hook = reset_hook;
    return cfg;
}

patchvm::ValidationResult Fixture::run(patchvm::Mode mode) const {
    return patchvm::validate_pool(classpath, suite.tests, pool, config(mode));
}

}  // namespace reftest
