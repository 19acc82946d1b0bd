#include <set>

#include "patchvm/classfile.hpp"

namespace patchvm {
namespace {

[[noreturn]] void reject(const ClassDef& c, const MethodDef& m, std::size_t pc,
                         const std::string& what) {
    throw VerifyError(c.name + "." + m.name + " pc " + std::to_string(pc) + ": " + what);
}

struct Effect {
    int pops = 0;
    int pushes = 0;
};

std::optional<Effect> fixed_effect(Op op) {
    switch (op) {
        case Op::Const:
        case Op::Load:
        case Op::GetStatic:
        case Op::New:
        case Op::ListNew: return Effect{0, 1};
        case Op::Store:
        case Op::PutStatic:
        case Op::Assert:
        case Op::Emit:
        case Op::JumpIf: return Effect{1, 0};
        case Op::GetField:
        case Op::Neg:
        case Op::Not:
        case Op::ListLen:
        case Op::SysGet: return Effect{1, 1};
        case Op::PutField:
        case Op::SysSet: return Effect{2, 0};
        case Op::Add:
        case Op::Sub:
        case Op::Mul:
        case Op::Div:
        case Op::Eq:
        case Op::Lt:
        case Op::Le:
        case Op::ListGet: return Effect{2, 1};
        case Op::ListPut: return Effect{3, 0};
        case Op::Label:
        case Op::Jump:
        case Op::Guard:
        case Op::Return:
        case Op::ReturnVal:
        case Op::Throw:
        case Op::CrashVm: return Effect{0, 0};
        case Op::InvokeStatic:
        case Op::InvokeVirtual: return std::nullopt;
    }
    return std::nullopt;
}

/// Knows only the methods of one class.
class LocalResolver final : public EffectResolver {
public:
    explicit LocalResolver(const ClassDef& c) : c_(c) {}

    std::optional<CallEffect> invoke_static(const std::string& owner,
                                            const std::string& method) const override {
        if (owner != c_.name) return std::nullopt;
        const MethodDef* m = c_.find_method(method);
        if (!m || !m->is_static() || m->is_clinit()) return std::nullopt;
        return CallEffect{m->params, m->returns_value()};
    }

    std::optional<CallEffect> invoke_virtual(const std::string&) const override {
        return std::nullopt;
    }

private:
    const ClassDef& c_;
};

}  // namespace

StackCheck verify_stack(const ClassDef& owner, const MethodDef& m, const EffectResolver& resolver) {
    const auto labels = m.labels();
    const bool returns = m.returns_value();
    const std::size_t n = m.body.size();
    std::vector<int> depth_at(n + 1, -1);
    std::vector<std::size_t> work;

    auto flow = [&](std::size_t pc, int depth, std::size_t from) {
        if (depth_at[pc] < 0) {
            depth_at[pc] = depth;
            work.push_back(pc);
        } else if (depth_at[pc] != depth) {
            reject(owner, m, from,
                   "inconsistent stack depth at join (" + std::to_string(depth_at[pc]) + " vs " +
                       std::to_string(depth) + ")");
        }
    };

    flow(0, 0, 0);
    while (!work.empty()) {
        std::size_t pc = work.back();
        work.pop_back();
        int depth = depth_at[pc];
        if (pc == n) {
            if (returns) reject(owner, m, pc, "falls off the end of a value-returning method");
            if (depth != 0) reject(owner, m, pc, "unbalanced stack at implicit return");
            continue;
        }
        const Instruction& insn = m.body[pc];
        Effect eff;
        if (auto fixed = fixed_effect(insn.op)) {
            eff = *fixed;
        } else {
            std::optional<CallEffect> call =
                insn.op == Op::InvokeStatic ? resolver.invoke_static(insn.owner, insn.member)
                                            : resolver.invoke_virtual(insn.member);
            if (!call) return StackCheck::Deferred;
            eff.pops = call->pops + (insn.op == Op::InvokeVirtual ? 1 : 0);
            eff.pushes = call->pushes ? 1 : 0;
        }
        if (depth < eff.pops) reject(owner, m, pc, "stack underflow in " + std::string(mnemonic(insn.op)));
        int after = depth - eff.pops + eff.pushes;
        switch (insn.op) {
            case Op::Return:
                if (depth != 0) reject(owner, m, pc, "unbalanced stack at return");
                break;
            case Op::ReturnVal:
                if (depth != 1) reject(owner, m, pc, "returnval needs exactly one stack value");
                break;
            case Op::Throw:
            case Op::CrashVm: break;
            case Op::Jump: flow(labels.at(insn.member), after, pc); break;
            case Op::JumpIf:
                flow(labels.at(insn.member), after, pc);
                flow(pc + 1, after, pc);
                break;
            default: flow(pc + 1, after, pc); break;
        }
    }
    return StackCheck::Verified;
}

void verify_class_local(const ClassDef& c) {
    auto fail = [&](const std::string& what) { throw VerifyError(c.name + ": " + what); };

    if (c.superclass && *c.superclass == c.name) fail("class extends itself");

    std::set<std::string> names;
    for (const auto& f : c.fields) {
        if (!names.insert(f.name).second) fail("duplicate field '" + f.name + "'");
        if (f.constant_value && (!f.is_final || !f.is_static() || f.type == FieldType::Ref)) {
            fail("constant value on non-constant field '" + f.name + "'");
        }
    }
    names.clear();
    for (const auto& m : c.methods) {
        if (!names.insert(m.name).second) fail("duplicate method '" + m.name + "'");
        if (m.params < 0) fail("negative parameter count on '" + m.name + "'");
        if (m.is_clinit()) {
            if (!m.is_static() || m.params != 0) fail("<clinit> must be static with no parameters");
            if (m.returns_value()) fail("<clinit> must not return a value");
        }

        bool has_return = false;
        bool has_returnval = false;
        std::set<std::string> label_names;
        for (std::size_t pc = 0; pc < m.body.size(); ++pc) {
            const auto& insn = m.body[pc];
            if (insn.op == Op::Label && !label_names.insert(insn.member).second) {
                reject(c, m, pc, "duplicate label '" + insn.member + "'");
            }
            has_return |= insn.op == Op::Return;
            has_returnval |= insn.op == Op::ReturnVal;
        }
        if (has_return && has_returnval) fail("method '" + m.name + "' mixes return and returnval");
        for (std::size_t pc = 0; pc < m.body.size(); ++pc) {
            const auto& insn = m.body[pc];
            if ((insn.op == Op::Jump || insn.op == Op::JumpIf) && !label_names.count(insn.member)) {
                reject(c, m, pc, "unresolved label '" + insn.member + "'");
            }
            if (insn.op == Op::PutStatic && insn.owner == c.name) {
                const FieldDef* f = c.find_field(insn.member);
                if (f && f->is_constant()) reject(c, m, pc, "assignment to constant '" + f->name + "'");
            }
            if ((insn.op == Op::Load || insn.op == Op::Store) && insn.index < 0) {
                reject(c, m, pc, "negative local index");
            }
        }
        verify_stack(c, m, LocalResolver(c));
    }
}

}  // namespace patchvm
