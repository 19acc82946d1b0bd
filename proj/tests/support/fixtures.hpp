#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "patchvm/classfile.hpp"
#include "patchvm/validator.hpp"

namespace reftest {

struct Fixture {
    std::string name;
    std::filesystem::path dir;
    std::vector<patchvm::ClassDef> classpath;
    patchvm::TestSuite suite;
    std::vector<patchvm::PatchCandidate> pool;
    std::optional<patchvm::TestId> reset_hook;

    patchvm::RunConfig config(patchvm::Mode mode) const;
    patchvm::ValidationResult run(patchvm::Mode mode) const;
};

std::filesystem::path fixture_root();
std::vector<std::string> fixture_names();
Fixture load_fixture(const std::string& name);

}  // namespace reftest
