#include <cmath>
#include <limits>

#include "vm/session_state.hpp"

namespace patchvm::detail {
namespace {

constexpr std::size_t kMaxFrames = 2048;

const char* type_name(const Value& v) {
    switch (v.index()) {
        case 0: return "null";
        case 1: return "int";
        case 2: return "float";
        case 3: return "bool";
        case 4: return "string";
        case 5: return "ref";
    }
    return "?";
}

[[noreturn]] void type_error(const char* op, const Value& a, const Value& b) {
    throw VmFailure{std::string("type error: ") + op + " on " + type_name(a) + " and " + type_name(b)};
}

[[noreturn]] void type_error(const char* op, const Value& a) {
    throw VmFailure{std::string("type error: ") + op + " on " + type_name(a)};
}

bool is_number(const Value& v) {
    return std::holds_alternative<std::int64_t>(v) || std::holds_alternative<double>(v);
}

double as_double(const Value& v) {
    if (auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
    return std::get<double>(v);
}

std::int64_t wrap(std::uint64_t v) { return static_cast<std::int64_t>(v); }

Value arith(Op op, const Value& a, const Value& b, const SessionState& s) {
    const auto* ia = std::get_if<std::int64_t>(&a);
    const auto* ib = std::get_if<std::int64_t>(&b);
    if (op == Op::Add && (std::holds_alternative<std::string>(a) || std::holds_alternative<std::string>(b))) {
        return s.render(a) + s.render(b);
    }
    if (ia && ib) {
        auto ua = static_cast<std::uint64_t>(*ia);
        auto ub = static_cast<std::uint64_t>(*ib);
        switch (op) {
            case Op::Add: return wrap(ua + ub);
            case Op::Sub: return wrap(ua - ub);
            case Op::Mul: return wrap(ua * ub);
            case Op::Div:
                if (*ib == 0) throw VmFailure{"division by zero"};
                if (*ia == std::numeric_limits<std::int64_t>::min() && *ib == -1) return *ia;
                return *ia / *ib;
            default: break;
        }
    }
    if (!is_number(a) || !is_number(b)) type_error(mnemonic(op).data(), a, b);
    double da = as_double(a);
    double db = as_double(b);
    switch (op) {
        case Op::Add: return da + db;
        case Op::Sub: return da - db;
        case Op::Mul: return da * db;
        case Op::Div:
            if (db == 0.0) throw VmFailure{"division by zero"};
            return da / db;
        default: break;
    }
    type_error(mnemonic(op).data(), a, b);
}

bool values_equal(const Value& a, const Value& b) {
    if (is_number(a) && is_number(b)) {
        if (a.index() == b.index() && std::holds_alternative<std::int64_t>(a)) {
            return std::get<std::int64_t>(a) == std::get<std::int64_t>(b);
        }
        return as_double(a) == as_double(b);
    }
    return a == b;
}

bool compare(Op op, const Value& a, const Value& b) {
    if (is_number(a) && is_number(b)) {
        if (std::holds_alternative<std::int64_t>(a) && std::holds_alternative<std::int64_t>(b)) {
            auto x = std::get<std::int64_t>(a);
            auto y = std::get<std::int64_t>(b);
            return op == Op::Lt ? x < y : x <= y;
        }
        double x = as_double(a);
        double y = as_double(b);
        return op == Op::Lt ? x < y : x <= y;
    }
    if (std::holds_alternative<std::string>(a) && std::holds_alternative<std::string>(b)) {
        const auto& x = std::get<std::string>(a);
        const auto& y = std::get<std::string>(b);
        return op == Op::Lt ? x < y : x <= y;
    }
    type_error(mnemonic(op).data(), a, b);
}

bool as_bool(const Value& v, const char* op) {
    if (auto* b = std::get_if<bool>(&v)) return *b;
    type_error(op, v);
}

std::int64_t as_index(const Value& v, const char* op) {
    if (auto* i = std::get_if<std::int64_t>(&v)) return *i;
    type_error(op, v);
}

}  // namespace

void Interpreter::charge_step() {
    if (ctx_.steps >= ctx_.budgets.steps) throw VmTimeout{};
    ++ctx_.steps;
}

std::uint32_t Interpreter::allocate(HeapCell cell) {
    if (ctx_.allocs >= ctx_.budgets.allocs) throw VmOutOfMemory{};
    ++ctx_.allocs;
    s_.heap.push_back(std::move(cell));
    return static_cast<std::uint32_t>(s_.heap.size() - 1);
}

Instance& Interpreter::instance_at(const Value& v, const char* what) {
    const auto* r = std::get_if<Ref>(&v);
    if (!r) {
        if (std::holds_alternative<std::monostate>(v)) throw VmFailure{std::string("null reference in ") + what};
        type_error(what, v);
    }
    auto* inst = std::get_if<Instance>(&s_.heap[r->id]);
    if (!inst) throw VmFailure{std::string("type error: ") + what + " on a list"};
    return *inst;
}

ListObject& Interpreter::list_at(const Value& v, const char* what) {
    const auto* r = std::get_if<Ref>(&v);
    if (!r) {
        if (std::holds_alternative<std::monostate>(v)) throw VmFailure{std::string("null reference in ") + what};
        type_error(what, v);
    }
    auto* list = std::get_if<ListObject>(&s_.heap[r->id]);
    if (!list) throw VmFailure{std::string("type error: ") + what + " on an object"};
    return *list;
}

void Interpreter::ensure_initialized(int cls) {
    if (s_.class_state[cls].initialized) return;
    int sup = s_.classes[cls].super;
    if (sup >= 0) ensure_initialized(sup);
    if (s_.class_state[cls].initialized) return;
    s_.class_state[cls].initialized = true;
    s_.order_trace.push_back(s_.classes[cls].name);
    if (s_.classes[cls].clinit >= 0) call(cls, s_.classes[cls].clinit, {});
}

Value Interpreter::call(int cls, int method, std::vector<Value> args) {
    const LinkedMethod& m = s_.classes[cls].methods[method];
    const std::size_t depth = s_.frames.size();
    const auto base = static_cast<std::uint32_t>(s_.stack.size());
    for (auto& a : args) s_.stack.push_back(std::move(a));
    push_frame(m, base);
    run(depth);
    if (m.returns) {
        Value v = std::move(s_.stack.back());
        s_.stack.pop_back();
        return v;
    }
    return std::monostate{};
}

void Interpreter::push_frame(const LinkedMethod& m, std::uint32_t base) {
    if (s_.frames.size() >= kMaxFrames) throw VmFailure{"stack overflow"};
    s_.stack.resize(base + static_cast<std::size_t>(m.num_locals));
    s_.frames.push_back(Frame{&m, 0, base});
}

void Interpreter::pop_frame(bool with_value) {
    const Frame f = s_.frames.back();
    Value v;
    if (with_value) v = std::move(s_.stack.back());
    s_.stack.resize(f.base);
    s_.frames.pop_back();
    if (with_value) s_.stack.push_back(std::move(v));
}

void Interpreter::invoke_virtual(const LinkedInsn& in) {
    auto& st = s_.stack;
    const std::size_t recv_at = st.size() - static_cast<std::size_t>(in.b) - 1;
    const Instance& obj = instance_at(st[recv_at], "invokevirtual");
    const LinkedClass& cls = s_.classes[obj.class_index];
    auto it = cls.vtable.find(in.a);
    if (it == cls.vtable.end()) {
        throw VmFailure{"no method " + s_.name_table[in.a] + " on " + cls.name};
    }
    const LinkedMethod& target = s_.classes[it->second.first].methods[it->second.second];
    push_frame(target, static_cast<std::uint32_t>(recv_at));
}

void Interpreter::run(std::size_t entry_depth) {
    auto& st = s_.stack;
    auto pop = [&st] {
        Value v = std::move(st.back());
        st.pop_back();
        return v;
    };

    while (s_.frames.size() > entry_depth) {
        Frame& f = s_.frames.back();
        const LinkedMethod& m = *f.method;
        if (f.pc >= m.code.size()) {
            pop_frame(false);
            continue;
        }
        const LinkedInsn in = m.code[f.pc];
        // Initialization triggers are charged once the class is initialized,
        // so a guard running the initializer first costs the same.
        if (in.op != Op::Guard && !is_init_trigger(in.op)) charge_step();
        ++f.pc;
        // `f` must not be used after anything that can push frames.
        switch (in.op) {
            case Op::Const: st.push_back(m.consts[in.a]); break;
            case Op::Load: {
                Value v = st[f.base + in.a];
                st.push_back(std::move(v));
                break;
            }
            case Op::Store: st[f.base + in.a] = pop(); break;
            case Op::GetStatic:
                ensure_initialized(in.a);
                charge_step();
                st.push_back(s_.class_state[in.a].statics[in.b]);
                break;
            case Op::PutStatic:
                ensure_initialized(in.a);
                charge_step();
                s_.class_state[in.a].statics[in.b] = pop();
                break;
            case Op::GetField: {
                Value obj = pop();
                Instance& inst = instance_at(obj, "getfield");
                const auto& slots = s_.classes[inst.class_index].instance_slot;
                auto it = slots.find(in.a);
                if (it == slots.end()) throw VmFailure{"no field " + s_.name_table[in.a]};
                st.push_back(inst.fields[it->second]);
                break;
            }
            case Op::PutField: {
                Value v = pop();
                Value obj = pop();
                Instance& inst = instance_at(obj, "putfield");
                const auto& slots = s_.classes[inst.class_index].instance_slot;
                auto it = slots.find(in.a);
                if (it == slots.end()) throw VmFailure{"no field " + s_.name_table[in.a]};
                inst.fields[it->second] = std::move(v);
                break;
            }
            case Op::New: {
                ensure_initialized(in.a);
                charge_step();
                Instance inst{static_cast<std::uint32_t>(in.a), s_.classes[in.a].instance_defaults};
                st.push_back(Ref{allocate(std::move(inst))});
                break;
            }
            case Op::InvokeStatic: {
                ensure_initialized(in.a);
                charge_step();
                const LinkedMethod& target = s_.classes[in.a].methods[in.b];
                push_frame(target, static_cast<std::uint32_t>(st.size() - target.params));
                break;
            }
            case Op::InvokeVirtual: invoke_virtual(in); break;
            case Op::Add:
            case Op::Sub:
            case Op::Mul:
            case Op::Div: {
                Value b = pop();
                Value a = pop();
                st.push_back(arith(in.op, a, b, s_));
                break;
            }
            case Op::Neg: {
                Value a = pop();
                if (auto* i = std::get_if<std::int64_t>(&a)) {
                    st.push_back(wrap(0 - static_cast<std::uint64_t>(*i)));
                } else if (auto* d = std::get_if<double>(&a)) {
                    st.push_back(-*d);
                } else {
                    type_error("neg", a);
                }
                break;
            }
            case Op::Eq: {
                Value b = pop();
                Value a = pop();
                st.push_back(values_equal(a, b));
                break;
            }
            case Op::Lt:
            case Op::Le: {
                Value b = pop();
                Value a = pop();
                st.push_back(compare(in.op, a, b));
                break;
            }
            case Op::Not: st.push_back(!as_bool(pop(), "not")); break;
            case Op::Label: break;
            case Op::Jump: f.pc = static_cast<std::uint32_t>(in.a); break;
            case Op::JumpIf:
                if (as_bool(pop(), "jumpif")) f.pc = static_cast<std::uint32_t>(in.a);
                break;
            case Op::Return: pop_frame(false); break;
            case Op::ReturnVal: pop_frame(true); break;
            case Op::Assert:
                if (!as_bool(pop(), "assert")) throw VmFailure{"assertion failed in " + m.qualified_name};
                break;
            case Op::Throw:
                throw VmFailure{"uncaught throw in " + m.qualified_name + ": " + m.strings[in.a]};
            case Op::ListNew: st.push_back(Ref{allocate(ListObject{})}); break;
            case Op::ListGet: {
                std::int64_t idx = as_index(pop(), "listget");
                Value list = pop();
                const auto& items = list_at(list, "listget").items;
                if (idx < 0 || static_cast<std::size_t>(idx) >= items.size()) {
                    throw VmFailure{"list index " + std::to_string(idx) + " out of range"};
                }
                Value v = items[static_cast<std::size_t>(idx)];
                st.push_back(std::move(v));
                break;
            }
            case Op::ListPut: {
                Value v = pop();
                std::int64_t idx = as_index(pop(), "listput");
                Value list = pop();
                auto& items = list_at(list, "listput").items;
                if (idx >= 0 && static_cast<std::size_t>(idx) == items.size()) {
                    items.push_back(std::move(v));
                } else if (idx >= 0 && static_cast<std::size_t>(idx) < items.size()) {
                    items[static_cast<std::size_t>(idx)] = std::move(v);
                } else {
                    throw VmFailure{"list index " + std::to_string(idx) + " out of range"};
                }
                break;
            }
            case Op::ListLen: {
                Value list = pop();
                st.push_back(static_cast<std::int64_t>(list_at(list, "listlen").items.size()));
                break;
            }
            case Op::SysSet: {
                Value v = pop();
                Value k = pop();
                s_.registry[s_.render(k)] = s_.render(v);
                break;
            }
            case Op::SysGet: {
                auto it = s_.registry.find(s_.render(pop()));
                st.push_back(it == s_.registry.end() ? std::string{} : it->second);
                break;
            }
            case Op::Emit: s_.emit_log.push_back(s_.render(pop())); break;
            case Op::CrashVm:
                s_.alive = false;
                throw VmCrashSignal{};
            case Op::Guard: guard_reinit(*this, in.a); break;
        }
    }
}

}  // namespace patchvm::detail
