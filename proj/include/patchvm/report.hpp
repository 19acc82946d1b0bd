#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "patchvm/validator.hpp"

namespace patchvm {

// Loading ------------------------------------------------------------------

/// Every `*.cls` file of `dir`, in file-name order. Throws ConfigError on IO
/// problems and on files that do not parse.
std::vector<ClassDef> load_classpath(const std::filesystem::path& dir);

struct PoolLoad {
    std::vector<PatchCandidate> candidates;  // sorted by directory name
    std::vector<std::string> warnings;
};

/// One candidate per immediate subdirectory. Unparseable class files mark
/// the candidate malformed instead of failing the load.
PoolLoad load_patch_pool(const std::filesystem::path& dir);

/// FNV-1a 64 over the canonical form of classpath, suite and pool, as hex.
std::string corpus_digest(std::span<const ClassDef> classpath, const TestSuite& suite,
                          std::span<const PatchCandidate> pool);

// Run reports --------------------------------------------------------------

inline constexpr std::string_view kReportSchema = "patchvm.run-report/1";

struct PatchRecord {
    std::string id;
    ValidationStatus status = ValidationStatus::Unknown;
    std::optional<TestId> failing_test;
    std::size_t tests_executed = 0;
    std::uint64_t steps = 0;
    double wall_ms = 0.0;

    bool operator==(const PatchRecord&) const = default;
};

struct PollutionRow {
    std::string class_name;
    std::string field;
    std::string reason;

    bool operator==(const PollutionRow&) const = default;
};

struct ReportConfig {
    Mode mode = Mode::Restart;
    Budgets budgets;
    std::vector<TestId> failing_tests;
    std::optional<TestId> reset_hook;
    std::uint64_t seed = 0;
    std::string classpath;
    std::string tests;
    std::string pool;

    bool operator==(const ReportConfig& o) const;
};

struct RunReport {
    ReportConfig config;
    std::string digest;
    std::vector<PatchRecord> patches;  // pool order
    double total_wall_ms = 0.0;
    std::size_t sessions_created = 0;
    std::vector<PollutionRow> pollution;

    StatusMap status_map() const;
    bool operator==(const RunReport&) const = default;
};

RunReport make_report(const ValidationResult& result, const ReportConfig& config, std::string digest);

std::string to_json(const RunReport& r);
/// Throws ConfigError on malformed documents or a different schema.
RunReport report_from_json(std::string_view text);
RunReport load_report(const std::filesystem::path& path);

inline constexpr std::string_view kCsvHeader = "id,status,failing_test,tests_executed,steps,wall_ms";
std::string to_csv(const RunReport& r);

/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

// Comparison ---------------------------------------------------------------

struct Divergence {
    std::string id;
    ValidationStatus status_a = ValidationStatus::Unknown;
    ValidationStatus status_b = ValidationStatus::Unknown;

    bool operator==(const Divergence&) const = default;
};

struct DivergenceReport {
    std::vector<Divergence> entries;
    std::size_t mismatch_count = 0;
    std::size_t total = 0;

    double ratio() const { return total == 0 ? 0.0 : static_cast<double>(mismatch_count) / static_cast<double>(total); }
    /// Percentage with two decimals, e.g. "5.41%".
    std::string ratio_percent() const;
};

/// Throws DigestMismatchError when the reports cover different corpora.
DivergenceReport compare_reports(const RunReport& a, const RunReport& b);
std::string to_json(const DivergenceReport& d);

struct SpeedupRecord {
    double speedup = 0.0;           // a / b, never clamped
    double median_patch_ms_a = 0.0;
    double median_patch_ms_b = 0.0;

    /// One decimal, e.g. "11.9".
    std::string formatted() const;
};

SpeedupRecord timing_summary(double total_ms_a, double total_ms_b);
/// Throws DigestMismatchError.
SpeedupRecord timing_summary(const RunReport& a, const RunReport& b);

std::string format_fixed(double value, int decimals);

}  // namespace patchvm
