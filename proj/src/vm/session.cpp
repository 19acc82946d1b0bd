#include <algorithm>
#include <functional>

#include "vm/session_state.hpp"

namespace patchvm {

using detail::ClassState;
using detail::Interpreter;
using detail::LinkedClass;
using detail::RunContext;
using detail::SessionState;

std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "PASS";
        case Verdict::Fail: return "FAIL";
        case Verdict::Timeout: return "TIMEOUT";
        case Verdict::MemoryError: return "MEMORY_ERROR";
        case Verdict::VmCrash: return "VM_CRASH";
    }
    return "?";
}

TestId TestId::parse(std::string_view text) {
    auto dot = text.find('.');
    if (dot == std::string_view::npos || dot == 0 || dot + 1 == text.size() ||
        text.find('.', dot + 1) != std::string_view::npos) {
        throw ConfigError("malformed test id '" + std::string(text) + "' (expected Class.method)");
    }
    return TestId{std::string(text.substr(0, dot)), std::string(text.substr(dot + 1))};
}

namespace {

// Super-first order; assumes the hierarchy is acyclic.
std::vector<int> hierarchy_order(const SessionState& s) {
    std::vector<int> order;
    std::vector<std::uint8_t> done(s.classes.size(), 0);
    std::function<void(int)> visit = [&](int c) {
        if (done[c]) return;
        if (s.classes[c].super >= 0) visit(s.classes[c].super);
        done[c] = 1;
        order.push_back(c);
    };
    for (int c = 0; c < static_cast<int>(s.classes.size()); ++c) visit(c);
    return order;
}

void build_declarations(SessionState& s, int index) {
    LinkedClass& lc = s.classes[index];
    const ClassDef& def = *lc.def;
    if (lc.super >= 0) {
        const LinkedClass& sup = s.classes[lc.super];
        lc.instance_slot = sup.instance_slot;
        lc.instance_defaults = sup.instance_defaults;
        lc.vtable = sup.vtable;
    }
    for (const auto& f : def.fields) {
        if (f.is_static()) {
            detail::StaticSlot slot{f.name, f.type, f.is_final, std::nullopt};
            if (f.constant_value) slot.constant = detail::literal_value(*f.constant_value);
            lc.static_index[f.name] = static_cast<int>(lc.statics.size());
            lc.statics.push_back(std::move(slot));
        } else {
            lc.instance_slot[s.intern(f.name)] = static_cast<int>(lc.instance_defaults.size());
            lc.instance_defaults.push_back(detail::default_value(f.type));
        }
    }
    for (std::size_t i = 0; i < def.methods.size(); ++i) {
        const MethodDef& m = def.methods[i];
        lc.method_index[m.name] = static_cast<int>(i);
        if (!m.is_static()) lc.vtable[s.intern(m.name)] = {index, static_cast<int>(i)};
        if (m.is_clinit()) lc.clinit = static_cast<int>(i);
        if (m.name == kRenamedClinitName) lc.renamed_clinit = static_cast<int>(i);
    }
}

std::vector<Value> initial_statics(const LinkedClass& lc) {
    std::vector<Value> out;
    out.reserve(lc.statics.size());
    for (const auto& slot : lc.statics) {
        out.push_back(slot.constant ? *slot.constant : detail::default_value(slot.type));
    }
    return out;
}

struct Unwind {
    SessionState& s;
    ~Unwind() {
        s.stack.clear();
        s.frames.clear();
    }
};

}  // namespace

namespace detail {

TestOutcome run_guarded(SessionState& s, const Budgets& budgets, const std::function<void(Interpreter&)>& body) {
    RunContext ctx{budgets, 0, 0};
    Interpreter in(s, ctx);
    const std::size_t emitted_before = s.emit_log.size();
    TestOutcome out;
    {
        Unwind unwind{s};
        try {
            body(in);
            out.verdict = Verdict::Pass;
        } catch (const VmFailure& f) {
            out.verdict = Verdict::Fail;
            out.detail = f.detail;
        } catch (const VmTimeout&) {
            out.verdict = Verdict::Timeout;
            out.detail = "step budget exhausted";
        } catch (const VmOutOfMemory&) {
            out.verdict = Verdict::MemoryError;
            out.detail = "allocation budget exhausted";
        } catch (const VmCrashSignal&) {
            out.verdict = Verdict::VmCrash;
            out.detail = "vm crashed";
        }
    }
    out.steps_used = ctx.steps;
    out.emit_snapshot.assign(s.emit_log.begin() + static_cast<std::ptrdiff_t>(emitted_before),
                             s.emit_log.end());
    return out;
}

}  // namespace detail

std::string detail::SessionState::render(const Value& v) const {
    struct Visitor {
        const SessionState& s;
        std::string operator()(std::monostate) const { return "null"; }
        std::string operator()(std::int64_t i) const { return std::to_string(i); }
        std::string operator()(double d) const { return format_literal(Literal{d}); }
        std::string operator()(bool b) const { return b ? "true" : "false"; }
        std::string operator()(const std::string& str) const { return str; }
        std::string operator()(Ref r) const {
            const HeapCell& cell = s.heap.at(r.id);
            if (const auto* inst = std::get_if<Instance>(&cell)) {
                return "<" + s.classes[inst->class_index].name + "@" + std::to_string(r.id) + ">";
            }
            return "<list@" + std::to_string(r.id) + ">";
        }
    };
    return std::visit(Visitor{*this}, v);
}

VmSession::VmSession(std::span<const ClassDef> classpath) : state_(std::make_unique<SessionState>()) {
    SessionState& s = *state_;
    for (const auto& def : classpath) {
        if (s.class_index.count(def.name)) throw LinkError("duplicate class " + def.name);
        s.class_index.emplace(def.name, static_cast<int>(s.classes.size()));
        LinkedClass lc;
        lc.def = std::make_shared<const ClassDef>(def);
        lc.name = def.name;
        s.classes.push_back(std::move(lc));
    }
    for (auto& lc : s.classes) {
        if (!lc.def->superclass) continue;
        int sup = s.find_class(*lc.def->superclass);
        if (sup < 0) throw LinkError("class " + lc.name + " extends missing class " + *lc.def->superclass);
        lc.super = sup;
    }
    for (std::size_t c = 0; c < s.classes.size(); ++c) {
        std::size_t hops = 0;
        for (int cur = s.classes[c].super; cur >= 0; cur = s.classes[cur].super) {
            if (++hops > s.classes.size()) throw LinkError("cyclic superclass chain at " + s.classes[c].name);
        }
    }
    for (int c : hierarchy_order(s)) build_declarations(s, c);
    for (int c = 0; c < static_cast<int>(s.classes.size()); ++c) {
        s.classes[c].methods = detail::link_methods(s, *s.classes[c].def, c);
        s.class_state.push_back(ClassState{false, initial_statics(s.classes[c])});
    }

    const std::size_t n = s.classes.size();
    s.epoch.reinit_flags.assign(n, 0);
    s.epoch.guarded.assign(n, 0);
    s.epoch.class_names.resize(n);
    for (std::size_t c = 0; c < n; ++c) {
        const LinkedClass& lc = s.classes[c];
        s.epoch.class_names[c] = lc.name;
        s.epoch.guarded[c] = lc.def->instrumented && lc.renamed_clinit >= 0;
    }
}

VmSession::~VmSession() = default;
VmSession::VmSession(VmSession&&) noexcept = default;
VmSession& VmSession::operator=(VmSession&&) noexcept = default;

bool VmSession::alive() const noexcept { return state_ && state_->alive; }

void VmSession::require_alive() const {
    if (!alive()) throw DeadSession();
}

TestOutcome VmSession::ensure_initialized(std::string_view cls, const Budgets& budgets) {
    require_alive();
    int c = state_->find_class(cls);
    if (c < 0) throw UnknownClassError("unknown class " + std::string(cls));
    return detail::run_guarded(*state_, budgets, [c](Interpreter& in) { in.ensure_initialized(c); });
}

TestOutcome VmSession::run_test(const TestId& test, const Budgets& budgets) {
    require_alive();
    SessionState& s = *state_;
    int c = s.find_class(test.class_name);
    if (c < 0) throw UnknownTestError("unknown test class in " + test.str());
    auto it = s.classes[c].method_index.find(test.method);
    if (it == s.classes[c].method_index.end()) throw UnknownTestError("unknown test method " + test.str());
    const MethodDef& m = s.classes[c].def->methods[it->second];
    if (!m.is_static() || m.params != 0 || m.is_clinit() || m.name == kRenamedClinitName) {
        throw UnknownTestError(test.str() + " is not a static zero-parameter method");
    }
    const int method = it->second;
    return detail::run_guarded(s, budgets, [c, method](Interpreter& in) {
        detail::guard_reinit(in, c);
        in.ensure_initialized(c);
        in.call(c, method, {});
    });
}

InitLedger VmSession::ledger() const {
    InitLedger out;
    for (std::size_t c = 0; c < state_->classes.size(); ++c) {
        out.flags[state_->classes[c].name] = state_->class_state[c].initialized;
    }
    out.order_trace = state_->order_trace;
    return out;
}

bool VmSession::is_initialized(std::string_view cls) const {
    int c = state_->find_class(cls);
    if (c < 0) throw UnknownClassError("unknown class " + std::string(cls));
    return state_->class_state[c].initialized;
}

const std::map<std::string, std::string>& VmSession::registry() const { return state_->registry; }

void VmSession::clear_registry() {
    require_alive();
    state_->registry.clear();
}

std::map<std::string, Value> VmSession::static_store() const {
    std::map<std::string, Value> out;
    for (std::size_t c = 0; c < state_->classes.size(); ++c) {
        const LinkedClass& lc = state_->classes[c];
        const ClassState& cs = state_->class_state[c];
        for (std::size_t i = 0; i < lc.statics.size(); ++i) {
            if (cs.initialized || lc.statics[i].constant) out[lc.name + "." + lc.statics[i].name] = cs.statics[i];
        }
    }
    return out;
}

std::optional<Value> VmSession::static_value(std::string_view cls, std::string_view field) const {
    int c = state_->find_class(cls);
    if (c < 0) return std::nullopt;
    const LinkedClass& lc = state_->classes[c];
    auto it = lc.static_index.find(std::string(field));
    if (it == lc.static_index.end()) return std::nullopt;
    if (!state_->class_state[c].initialized && !lc.statics[it->second].constant) return std::nullopt;
    return state_->class_state[c].statics[it->second];
}

const std::vector<std::string>& VmSession::emit_log() const { return state_->emit_log; }

std::size_t VmSession::heap_size() const { return state_->heap.size(); }

std::string VmSession::render(const Value& v) const { return state_->render(v); }

StateSnapshot VmSession::snapshot() const {
    return StateSnapshot{static_store(), ledger(), state_->registry, state_->heap};
}

std::vector<ClassDef> VmSession::class_table() const {
    std::vector<ClassDef> out;
    out.reserve(state_->classes.size());
    for (const auto& lc : state_->classes) out.push_back(*lc.def);
    std::sort(out.begin(), out.end(), [](const ClassDef& a, const ClassDef& b) { return a.name < b.name; });
    return out;
}

const ClassDef* VmSession::find_class(std::string_view name) const {
    int c = state_->find_class(name);
    return c < 0 ? nullptr : state_->classes[c].def.get();
}

EpochRuntime& VmSession::epoch() { return state_->epoch; }
const EpochRuntime& VmSession::epoch() const { return state_->epoch; }

}  // namespace patchvm
