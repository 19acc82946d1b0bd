#pragma once

// Internal representation shared by the interpreter, hotswap and reset code.

#include <functional>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "patchvm/vm.hpp"

namespace patchvm::detail {

/// Operand-resolved instruction. Meaning of `a`/`b` depends on `op`:
///   Const        a = constant pool index (also used for constant getstatic)
///   Load/Store   a = local slot
///   Get/PutStatic a = class, b = static slot
///   Get/PutField a = interned field name
///   New/Guard    a = class
///   InvokeStatic a = class, b = method
///   InvokeVirtual a = interned method name, b = parameter count
///   Jump/JumpIf  a = target pc
///   Throw        a = string pool index
struct LinkedInsn {
    Op op = Op::Return;
    std::int32_t a = 0;
    std::int32_t b = 0;
};

struct LinkedMethod {
    const MethodDef* def = nullptr;
    std::string qualified_name;
    int owner = -1;
    int params = 0;
    bool is_static = true;
    bool returns = false;
    int num_locals = 0;
    std::vector<LinkedInsn> code;
    std::vector<Value> consts;
    std::vector<std::string> strings;
};

struct StaticSlot {
    std::string name;
    FieldType type = FieldType::Int;
    bool is_final = false;
    std::optional<Value> constant;
};

struct LinkedClass {
    std::shared_ptr<const ClassDef> def;
    std::string name;
    int super = -1;
    std::vector<LinkedMethod> methods;
    std::unordered_map<std::string, int> method_index;
    std::vector<StaticSlot> statics;
    std::unordered_map<std::string, int> static_index;
    std::unordered_map<int, int> instance_slot;  // interned field name -> slot
    std::vector<Value> instance_defaults;
    std::unordered_map<int, std::pair<int, int>> vtable;  // interned name -> (class, method)
    int clinit = -1;
    int renamed_clinit = -1;
};

struct ClassState {
    bool initialized = false;
    std::vector<Value> statics;
};

struct Frame {
    const LinkedMethod* method = nullptr;
    std::uint32_t pc = 0;
    std::uint32_t base = 0;  // first local in the value stack
};

struct SessionState {
    std::vector<LinkedClass> classes;
    std::unordered_map<std::string, int> class_index;
    std::vector<ClassState> class_state;
    std::vector<std::string> order_trace;
    std::unordered_map<std::string, int> names;
    std::vector<std::string> name_table;
    std::map<std::string, std::string> registry;
    std::vector<std::string> emit_log;
    std::vector<HeapCell> heap;
    EpochRuntime epoch;
    bool alive = true;

    std::vector<Value> stack;
    std::vector<Frame> frames;

    int intern(const std::string& name);
    int find_class(std::string_view name) const;
    std::string render(const Value& v) const;
};

Value default_value(FieldType t);
Value literal_value(const Literal& lit);

/// Builds the linked form of `def` inside `s` at class slot `index`; the
/// declaration-level tables of every class must already exist. Throws
/// LinkError / VerifyError.
std::vector<LinkedMethod> link_methods(SessionState& s, const ClassDef& def, int index);

// Interpreter signals. Not part of the public error hierarchy: they never
// escape VmSession.
struct VmFailure {
    std::string detail;
};
struct VmTimeout {};
struct VmOutOfMemory {};
struct VmCrashSignal {};

struct RunContext {
    Budgets budgets;
    std::uint64_t steps = 0;
    std::uint64_t allocs = 0;
};

class Interpreter {
public:
    Interpreter(SessionState& s, RunContext& ctx) : s_(s), ctx_(ctx) {}

    void ensure_initialized(int cls);
    /// Runs a method to completion on top of the current frames.
    Value call(int cls, int method, std::vector<Value> args);
    /// Charges one step; throws VmTimeout when the budget is spent.
    void charge_step();

    SessionState& session() { return s_; }

private:
    void run(std::size_t entry_depth);
    void push_frame(const LinkedMethod& m, std::uint32_t base);
    void pop_frame(bool with_value);
    std::uint32_t allocate(HeapCell cell);
    Instance& instance_at(const Value& v, const char* what);
    ListObject& list_at(const Value& v, const char* what);
    void invoke_virtual(const LinkedInsn& in);

    SessionState& s_;
    RunContext& ctx_;
};

/// Epoch guard (implemented with the reset module): reinitializes `cls` and
/// its guarded superclasses once per epoch.
void guard_reinit(Interpreter& in, int cls);

/// Runs `body` with fresh per-call budgets, converting interpreter signals
/// into an outcome and clearing frames afterwards.
TestOutcome run_guarded(SessionState& s, const Budgets& budgets,
                        const std::function<void(Interpreter&)>& body);

/// Debug-only eager variant: marks every class in `classes` and reruns their
/// initializers in the given order, ignoring trigger order.
void eager_reinit(Interpreter& in, const std::vector<int>& classes);

}  // namespace patchvm::detail
