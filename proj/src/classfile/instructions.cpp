#include <array>
#include <charconv>
#include <cmath>
#include <utility>

#include "patchvm/classfile.hpp"

namespace patchvm {

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& message)
    : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
            message),
      line_(line),
      column_(column) {}

namespace {

struct OpName {
    Op op;
    std::string_view name;
};

constexpr std::array kOpNames{
    OpName{Op::Const, "const"},
    OpName{Op::Load, "load"},
    OpName{Op::Store, "store"},
    OpName{Op::GetStatic, "getstatic"},
    OpName{Op::PutStatic, "putstatic"},
    OpName{Op::GetField, "getfield"},
    OpName{Op::PutField, "putfield"},
    OpName{Op::New, "new"},
    OpName{Op::InvokeStatic, "invokestatic"},
    OpName{Op::InvokeVirtual, "invokevirtual"},
    OpName{Op::Add, "add"},
    OpName{Op::Sub, "sub"},
    OpName{Op::Mul, "mul"},
    OpName{Op::Div, "div"},
    OpName{Op::Neg, "neg"},
    OpName{Op::Eq, "eq"},
    OpName{Op::Lt, "lt"},
    OpName{Op::Le, "le"},
    OpName{Op::Not, "not"},
    OpName{Op::Label, "label"},
    OpName{Op::Jump, "jump"},
    OpName{Op::JumpIf, "jumpif"},
    OpName{Op::Return, "return"},
    OpName{Op::ReturnVal, "returnval"},
    OpName{Op::Assert, "assert"},
    OpName{Op::Throw, "throw"},
    OpName{Op::ListNew, "listnew"},
    OpName{Op::ListGet, "listget"},
    OpName{Op::ListPut, "listput"},
    OpName{Op::ListLen, "listlen"},
    OpName{Op::SysSet, "sysset"},
    OpName{Op::SysGet, "sysget"},
    OpName{Op::Emit, "emit"},
    OpName{Op::CrashVm, "crashvm"},
    OpName{Op::Guard, "guard"},
};

}  // namespace

std::string_view mnemonic(Op op) {
    for (const auto& entry : kOpNames) {
        if (entry.op == op) return entry.name;
    }
    return "?";
}

std::optional<Op> op_from_mnemonic(std::string_view s) {
    for (const auto& entry : kOpNames) {
        if (entry.name == s) return entry.op;
    }
    return std::nullopt;
}

bool is_init_trigger(Op op) {
    return op == Op::New || op == Op::InvokeStatic || op == Op::PutStatic || op == Op::GetStatic;
}

std::string_view to_string(FieldType t) {
    switch (t) {
        case FieldType::Int: return "int";
        case FieldType::Float: return "float";
        case FieldType::Bool: return "bool";
        case FieldType::String: return "string";
        case FieldType::Ref: return "ref";
    }
    return "?";
}

std::optional<FieldType> field_type_from(std::string_view s) {
    if (s == "int") return FieldType::Int;
    if (s == "float") return FieldType::Float;
    if (s == "bool") return FieldType::Bool;
    if (s == "string") return FieldType::String;
    if (s == "ref") return FieldType::Ref;
    return std::nullopt;
}

namespace {

std::string format_double(double d) {
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), d);
    std::string s(buf.data(), end);
    if (s.find_first_of(".eEn") == std::string::npos) {
        s += ".0";
    } else if (s.find('.') == std::string::npos && s.find_first_of("eE") != std::string::npos) {
        s.insert(s.find_first_of("eE"), ".0");
    }
    return s;
}

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char ch : s) {
        switch (ch) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += ch;
        }
    }
    out += '"';
    return out;
}

}  // namespace

std::string format_literal(const Literal& lit) {
    struct Visitor {
        std::string operator()(std::monostate) const { return "null"; }
        std::string operator()(std::int64_t v) const { return std::to_string(v); }
        std::string operator()(double v) const { return format_double(v); }
        std::string operator()(bool v) const { return v ? "true" : "false"; }
        std::string operator()(const std::string& v) const { return quote(v); }
    };
    return std::visit(Visitor{}, lit);
}

Instruction make_insn(Op op) {
    Instruction i;
    i.op = op;
    return i;
}

Instruction make_const(Literal lit) {
    Instruction i = make_insn(Op::Const);
    i.literal = std::move(lit);
    return i;
}

Instruction make_local(Op op, std::int64_t index) {
    Instruction i = make_insn(op);
    i.index = index;
    return i;
}

Instruction make_member(Op op, std::string owner, std::string member) {
    Instruction i = make_insn(op);
    i.owner = std::move(owner);
    i.member = std::move(member);
    return i;
}

Instruction make_class_op(Op op, std::string owner) {
    Instruction i = make_insn(op);
    i.owner = std::move(owner);
    return i;
}

Instruction make_named(Op op, std::string name) {
    Instruction i = make_insn(op);
    i.member = std::move(name);
    return i;
}

std::map<std::string, std::size_t> MethodDef::labels() const {
    std::map<std::string, std::size_t> out;
    for (std::size_t pc = 0; pc < body.size(); ++pc) {
        if (body[pc].op == Op::Label) out.emplace(body[pc].member, pc);
    }
    return out;
}

bool MethodDef::returns_value() const {
    for (const auto& insn : body) {
        if (insn.op == Op::ReturnVal) return true;
    }
    return false;
}

const FieldDef* ClassDef::find_field(std::string_view n) const {
    for (const auto& f : fields) {
        if (f.name == n) return &f;
    }
    return nullptr;
}

const MethodDef* ClassDef::find_method(std::string_view n) const {
    for (const auto& m : methods) {
        if (m.name == n) return &m;
    }
    return nullptr;
}

MethodDef* ClassDef::find_method(std::string_view n) {
    for (auto& m : methods) {
        if (m.name == n) return &m;
    }
    return nullptr;
}

LayoutSignature layout_signature(const ClassDef& c) {
    LayoutSignature sig;
    sig.class_name = c.name;
    sig.superclass = c.superclass.value_or("");
    for (const auto& f : c.fields) sig.fields.emplace_back(f.name, f.kind, f.type, f.is_final);
    for (const auto& m : c.methods) sig.methods.emplace_back(m.name, m.kind, m.params);
    return sig;
}

std::string describe(const LayoutSignature& sig) {
    std::string out = sig.class_name;
    if (!sig.superclass.empty()) out += " extends " + sig.superclass;
    out += " {";
    for (const auto& [name, kind, type, fin] : sig.fields) {
        out += kind == MemberKind::Static ? " static" : "";
        out += fin ? " final" : "";
        out += " " + std::string(to_string(type)) + " " + name + ";";
    }
    for (const auto& [name, kind, params] : sig.methods) {
        out += kind == MemberKind::Static ? " static" : "";
        out += " fn " + name + "(" + std::to_string(params) + ");";
    }
    out += " }";
    return out;
}

}  // namespace patchvm
