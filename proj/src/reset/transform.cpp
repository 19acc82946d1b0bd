#include "patchvm/reset.hpp"

namespace patchvm {
namespace {

bool needs_guard(const Instruction& insn, const PollutionReport& report) {
    if (!is_init_trigger(insn.op) || !report.is_guard_target(insn.owner)) return false;
    return !(insn.op == Op::GetStatic && report.is_constant(insn.owner, insn.member));
}

std::vector<Instruction> guard_triggers(const std::vector<Instruction>& body, const PollutionReport& report) {
    std::vector<Instruction> out;
    out.reserve(body.size());
    for (const auto& insn : body) {
        if (needs_guard(insn, report)) out.push_back(make_class_op(Op::Guard, insn.owner));
        out.push_back(insn);
    }
    return out;
}

}  // namespace

ClassDef transform(const ClassDef& c, const PollutionReport& report) {
    if (c.instrumented) throw AlreadyTransformedError("class " + c.name + " is already transformed");
    if (c.find_method(kRenamedClinitName)) {
        throw AlreadyTransformedError("class " + c.name + " already declares " + std::string(kRenamedClinitName));
    }
    ClassDef out = c;
    out.instrumented = true;
    for (auto& m : out.methods) m.body = guard_triggers(m.body, report);

    if (!report.is_flagged(c.name)) return out;

    for (auto& f : out.fields) {
        if (report.is_flagged(c.name, f.name)) f.is_final = false;
    }
    MethodDef renamed{std::string(kRenamedClinitName), MemberKind::Static, 0, {}};
    if (MethodDef* clinit = out.find_method(kClinitName)) {
        renamed.body = std::move(clinit->body);
        clinit->body = {make_class_op(Op::Guard, c.name)};
    }
    out.methods.push_back(std::move(renamed));
    return out;
}

std::vector<ClassDef> transform_all(std::span<const ClassDef> classes, const PollutionReport& report) {
    std::vector<ClassDef> out;
    out.reserve(classes.size());
    for (const auto& c : classes) out.push_back(transform(c, report));
    return out;
}

}  // namespace patchvm
