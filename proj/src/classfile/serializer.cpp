#include <sstream>

#include "patchvm/classfile.hpp"

namespace patchvm {
namespace {

void write_instruction(std::ostringstream& out, const Instruction& i) {
    out << "    " << mnemonic(i.op);
    switch (i.op) {
        case Op::Const: out << ' ' << format_literal(i.literal); break;
        case Op::Load:
        case Op::Store: out << ' ' << i.index; break;
        case Op::GetStatic:
        case Op::PutStatic:
        case Op::InvokeStatic: out << ' ' << i.owner << '.' << i.member; break;
        case Op::GetField:
        case Op::PutField:
        case Op::InvokeVirtual:
        case Op::Label:
        case Op::Jump:
        case Op::JumpIf: out << ' ' << i.member; break;
        case Op::New:
        case Op::Guard: out << ' ' << i.owner; break;
        case Op::Throw: out << ' ' << format_literal(i.member); break;
        default: break;
    }
    out << '\n';
}

}  // namespace

std::string serialize_class(const ClassDef& c) {
    std::ostringstream out;
    out << "class " << c.name;
    if (c.superclass) out << " extends " << *c.superclass;
    if (c.instrumented) out << " instrumented";
    out << " {\n";
    for (const auto& f : c.fields) {
        out << "  ";
        if (f.is_static()) out << "static ";
        if (f.is_final) out << "final ";
        out << to_string(f.type) << ' ' << f.name;
        if (f.constant_value) out << " = " << format_literal(*f.constant_value);
        out << '\n';
    }
    for (const auto& m : c.methods) {
        if (m.is_clinit()) {
            out << "  init {\n";
        } else {
            out << "  " << (m.is_static() ? "static " : "") << "fn " << m.name << '(' << m.params
                << ") {\n";
        }
        for (const auto& insn : m.body) write_instruction(out, insn);
        out << "  }\n";
    }
    out << "}\n";
    return out.str();
}

}  // namespace patchvm
