#include <algorithm>
#include <limits>
#include <set>

#include "vm/session_state.hpp"

namespace patchvm::detail {
namespace {

class SessionResolver final : public EffectResolver {
public:
    explicit SessionResolver(const SessionState& s) : s_(s) {}

    std::optional<CallEffect> invoke_static(const std::string& owner,
                                            const std::string& method) const override {
        int cls = s_.find_class(owner);
        if (cls < 0) throw LinkError("invokestatic of unknown class " + owner);
        const MethodDef* m = s_.classes[cls].def->find_method(method);
        if (!m || !m->is_static() || m->is_clinit()) {
            throw LinkError("invokestatic of unknown static method " + owner + "." + method);
        }
        return CallEffect{m->params, m->returns_value()};
    }

    std::optional<CallEffect> invoke_virtual(const std::string& method) const override {
        std::optional<CallEffect> found;
        std::string first_owner;
        for (const auto& c : s_.classes) {
            const MethodDef* m = c.def->find_method(method);
            if (!m || m->is_static()) continue;
            CallEffect e{m->params, m->returns_value()};
            if (!found) {
                found = e;
                first_owner = c.name;
            } else if (found->pops != e.pops || found->pushes != e.pushes) {
                throw VerifyError("instance method '" + method + "' has inconsistent signatures in " +
                                  first_owner + " and " + c.name);
            }
        }
        if (!found) throw LinkError("invokevirtual of unknown method " + method);
        return found;
    }

private:
    const SessionState& s_;
};

}  // namespace

Value default_value(FieldType t) {
    switch (t) {
        case FieldType::Int: return std::int64_t{0};
        case FieldType::Float: return 0.0;
        case FieldType::Bool: return false;
        case FieldType::String: return std::string{};
        case FieldType::Ref: return std::monostate{};
    }
    return std::monostate{};
}

Value literal_value(const Literal& lit) {
    return std::visit([](const auto& v) -> Value { return v; }, lit);
}

std::vector<LinkedMethod> link_methods(SessionState& s, const ClassDef& def, int index) {
    std::vector<LinkedMethod> out;
    out.reserve(def.methods.size());
    SessionResolver resolver(s);

    for (const auto& m : def.methods) {
        LinkedMethod lm;
        lm.def = &m;
        // A relocated initializer reports under its source name so that
        // transformed code fails with the same details as the original.
        lm.qualified_name = def.name + "." + (m.name == kRenamedClinitName ? std::string(kClinitName) : m.name);
        lm.owner = index;
        lm.params = m.params;
        lm.is_static = m.is_static();
        lm.returns = m.returns_value();
        int locals = m.params + (m.is_static() ? 0 : 1);
        const auto labels = m.labels();

        auto where = [&](std::size_t pc) { return lm.qualified_name + " pc " + std::to_string(pc); };

        for (std::size_t pc = 0; pc < m.body.size(); ++pc) {
            const Instruction& insn = m.body[pc];
            LinkedInsn li;
            li.op = insn.op;
            switch (insn.op) {
                case Op::Const:
                    li.a = static_cast<std::int32_t>(lm.consts.size());
                    lm.consts.push_back(literal_value(insn.literal));
                    break;
                case Op::Load:
                case Op::Store:
                    if (insn.index > std::numeric_limits<std::int16_t>::max()) {
                        throw VerifyError(where(pc) + ": local index too large");
                    }
                    li.a = static_cast<std::int32_t>(insn.index);
                    locals = std::max(locals, li.a + 1);
                    break;
                case Op::GetStatic:
                case Op::PutStatic: {
                    int cls = s.find_class(insn.owner);
                    if (cls < 0) throw LinkError(where(pc) + ": unknown class " + insn.owner);
                    const LinkedClass& target = s.classes[cls];
                    auto it = target.static_index.find(insn.member);
                    if (it == target.static_index.end()) {
                        throw LinkError(where(pc) + ": unknown static field " + insn.owner + "." +
                                        insn.member);
                    }
                    const StaticSlot& slot = target.statics[it->second];
                    if (slot.constant) {
                        if (insn.op == Op::PutStatic) {
                            throw LinkError(where(pc) + ": assignment to constant " + insn.owner +
                                            "." + insn.member);
                        }
                        // Constant variables are inlined: no initialization trigger.
                        li.op = Op::Const;
                        li.a = static_cast<std::int32_t>(lm.consts.size());
                        lm.consts.push_back(*slot.constant);
                    } else {
                        li.a = cls;
                        li.b = it->second;
                    }
                    break;
                }
                case Op::GetField:
                case Op::PutField: li.a = s.intern(insn.member); break;
                case Op::New:
                case Op::Guard: {
                    int cls = s.find_class(insn.owner);
                    if (cls < 0) throw LinkError(where(pc) + ": unknown class " + insn.owner);
                    li.a = cls;
                    break;
                }
                case Op::InvokeStatic: {
                    resolver.invoke_static(insn.owner, insn.member);
                    int cls = s.find_class(insn.owner);
                    li.a = cls;
                    li.b = s.classes[cls].method_index.at(insn.member);
                    break;
                }
                case Op::InvokeVirtual: {
                    auto eff = resolver.invoke_virtual(insn.member);
                    li.a = s.intern(insn.member);
                    li.b = eff->pops;
                    break;
                }
                case Op::Jump:
                case Op::JumpIf: li.a = static_cast<std::int32_t>(labels.at(insn.member)); break;
                case Op::Throw:
                    li.a = static_cast<std::int32_t>(lm.strings.size());
                    lm.strings.push_back(insn.member);
                    break;
                default: break;
            }
            lm.code.push_back(li);
        }
        lm.num_locals = locals;
        verify_stack(def, m, resolver);
        out.push_back(std::move(lm));
    }
    return out;
}

int SessionState::intern(const std::string& name) {
    auto [it, inserted] = names.emplace(name, static_cast<int>(name_table.size()));
    if (inserted) name_table.push_back(name);
    return it->second;
}

int SessionState::find_class(std::string_view name) const {
    auto it = class_index.find(std::string(name));
    return it == class_index.end() ? -1 : it->second;
}

}  // namespace patchvm::detail
