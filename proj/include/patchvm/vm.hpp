#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "patchvm/classfile.hpp"
#include "patchvm/epoch.hpp"
#include "patchvm/test_id.hpp"
#include "patchvm/value.hpp"

namespace patchvm {

struct Budgets {
    std::uint64_t steps = 1'000'000;
    std::uint64_t allocs = 100'000;
};

enum class Verdict : std::uint8_t { Pass, Fail, Timeout, MemoryError, VmCrash };

std::string_view to_string(Verdict v);

struct TestOutcome {
    Verdict verdict = Verdict::Pass;
    std::string detail;
    std::uint64_t steps_used = 0;
    std::vector<std::string> emit_snapshot;

    bool passed() const noexcept { return verdict == Verdict::Pass; }
    bool operator==(const TestOutcome&) const = default;
};

struct InitLedger {
    std::map<std::string, bool> flags;
    std::vector<std::string> order_trace;

    bool operator==(const InitLedger&) const = default;
};

/// Everything hotswap must leave untouched.
struct StateSnapshot {
    std::map<std::string, Value> statics;  // "Class.field"
    InitLedger ledger;
    std::map<std::string, std::string> registry;
    std::vector<HeapCell> heap;

    bool operator==(const StateSnapshot&) const = default;
};

namespace detail {
struct SessionState;
}

/// A live VM. Single-threaded; may be moved between threads but never used
/// concurrently.
class VmSession {
public:
    /// Links and verifies the classpath. No class is initialized.
    /// Throws LinkError (missing/duplicate class, cyclic hierarchy, unresolved
    /// member) or VerifyError.
    explicit VmSession(std::span<const ClassDef> classpath);
    ~VmSession();
    VmSession(VmSession&&) noexcept;
    VmSession& operator=(VmSession&&) noexcept;

    bool alive() const noexcept;

    /// Runs `<clinit>` of `cls` (superclasses first) unless already done.
    TestOutcome ensure_initialized(std::string_view cls, const Budgets& budgets = {});

    /// Runs a static zero-parameter method. Throws DeadSession after a crash,
    /// UnknownTestError when the method does not exist or has the wrong shape.
    TestOutcome run_test(const TestId& test, const Budgets& budgets = {});

    InitLedger ledger() const;
    bool is_initialized(std::string_view cls) const;
    const std::map<std::string, std::string>& registry() const;
    void clear_registry();
    /// Entries exist only for initialized classes, plus constant variables.
    std::map<std::string, Value> static_store() const;
    std::optional<Value> static_value(std::string_view cls, std::string_view field) const;
    const std::vector<std::string>& emit_log() const;
    std::size_t heap_size() const;
    std::string render(const Value& v) const;
    StateSnapshot snapshot() const;

    /// Current live definitions, sorted by class name.
    std::vector<ClassDef> class_table() const;
    const ClassDef* find_class(std::string_view name) const;

    EpochRuntime& epoch();
    const EpochRuntime& epoch() const;

    detail::SessionState& state() { return *state_; }
    const detail::SessionState& state() const { return *state_; }

private:
    void require_alive() const;

    std::unique_ptr<detail::SessionState> state_;
};

}  // namespace patchvm
