#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "patchvm/classfile.hpp"
#include "patchvm/pollution.hpp"
#include "patchvm/test_id.hpp"
#include "patchvm/vm.hpp"

namespace patchvm {

enum class Mode : std::uint8_t { Restart, Vanilla, Reset };

std::string_view to_string(Mode m);
/// Accepts `restart`, `vanilla`, `reset` (any case). Throws ConfigError.
Mode parse_mode(std::string_view s);

enum class ValidationStatus : std::uint8_t {
    Plausible,
    NonPlausible,
    Timeout,
    MemoryError,
    UnknownError,
    Unknown,
};

std::string_view to_string(ValidationStatus s);
/// Throws ConfigError on an unknown name.
ValidationStatus parse_status(std::string_view s);
bool is_error(ValidationStatus s);

/// One candidate fix. A patch whose files failed to parse carries the
/// message in `malformed` and is reported UNKNOWN_ERROR without running.
struct PatchCandidate {
    std::string id;
    std::vector<ClassDef> classes;
    std::optional<std::string> malformed;
};

/// The verdict part of a patch's result. Step counts are telemetry: RESTART
/// re-runs initializers of unflagged classes that RESET legitimately reuses.
struct StatusEntry {
    ValidationStatus status = ValidationStatus::Unknown;
    std::optional<TestId> failing_test;
    std::size_t tests_executed = 0;

    bool operator==(const StatusEntry&) const = default;
};

using StatusMap = std::map<std::string, StatusEntry>;

struct TestSuite {
    std::vector<TestId> tests;    // manifest order
    std::vector<TestId> failing;  // `failing:` entries, manifest order
};

/// `Class.method` per line; `#` starts a comment; a `failing:` prefix marks
/// an originally failing test (which is also part of the suite).
TestSuite parse_manifest(std::string_view text);
TestSuite load_manifest(const std::filesystem::path& path);

/// failing (given order) followed by the remaining tests in original order.
/// Throws UnknownTestError if a failing test is not in `all`.
std::vector<TestId> order_tests(std::span<const TestId> all, std::span<const TestId> failing);

struct RunConfig {
    Mode mode = Mode::Restart;
    Budgets budgets;
    std::vector<TestId> failing_tests;
    std::optional<TestId> reset_hook;
    std::uint64_t seed = 0;
    /// Debug only (RESET): reinitialize eagerly in name order.
    bool eager_reinit = false;
    /// Test instrumentation: called after a patch that kept its session has
    /// been swapped back (VANILLA/RESET) or finished (RESTART).
    std::function<void(const std::string& patch_id, const VmSession&)> after_patch;
};

struct PatchTelemetry {
    std::string id;
    std::uint64_t steps = 0;
    double wall_ms = 0.0;
};

struct ValidationResult {
    StatusMap statuses;
    std::vector<PatchTelemetry> telemetry;  // pool order
    std::size_t sessions_created = 0;
    double total_wall_ms = 0.0;
    PollutionReport pollution;
};

/// Runs the whole pool in the configured mode. Throws UnknownTestError,
/// LinkError/VerifyError (unpatched classpath invalid), HarnessError.
ValidationResult validate_pool(std::span<const ClassDef> classpath, std::span<const TestId> tests,
                               std::span<const PatchCandidate> pool, const RunConfig& cfg);

}  // namespace patchvm
