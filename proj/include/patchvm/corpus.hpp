#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "patchvm/classfile.hpp"
#include "patchvm/validator.hpp"

namespace patchvm {

struct Corpus {
    std::vector<ClassDef> classpath;
    TestSuite suite;
    std::vector<PatchCandidate> pool;
};

struct GeneratorConfig {
    std::uint64_t seed = 1;
    int classes = 4;   // library + state classes; Target and Suite come on top
    int patches = 10;
    double pollution_rate = 0.2;
};

/// Deterministic synthetic program plus patch pool. Every patch rewrites the
/// body of `Target.fix`. Throws ConfigError on out-of-range arguments.
Corpus generate_corpus(const GeneratorConfig& cfg);

/// Writes `classpath/`, `tests.manifest` and `patches-pool/` under `dir`.
void write_corpus(const Corpus& corpus, const std::filesystem::path& dir);

/// Reads the same layout back. Pool warnings are returned in `warnings`.
Corpus load_corpus(const std::filesystem::path& dir, std::vector<std::string>* warnings = nullptr);

/// generate_corpus + write_corpus.
void generate_pool(const GeneratorConfig& cfg, const std::filesystem::path& dir);

std::string render_manifest(const TestSuite& suite);

}  // namespace patchvm
