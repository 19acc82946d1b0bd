#include "patchvm/pollution.hpp"

#include <map>

namespace patchvm {

std::string_view to_string(PollutionReason r) {
    return r == PollutionReason::MutableStatic ? "MUTABLE_STATIC" : "FINAL_REFERENCE";
}

namespace {
template <class Set>
bool contains(const Set& s, std::string_view a, std::string_view b) {
    return s.count(FieldKey{std::string(a), std::string(b)}) != 0;
}
}  // namespace

bool PollutionReport::is_flagged(std::string_view cls) const {
    return flagged_classes.count(std::string(cls)) != 0;
}

bool PollutionReport::is_flagged(std::string_view cls, std::string_view field) const {
    return contains(flagged_fields, cls, field);
}

bool PollutionReport::is_guard_target(std::string_view cls) const {
    return guard_targets.count(std::string(cls)) != 0;
}

bool PollutionReport::is_constant(std::string_view cls, std::string_view field) const {
    return contains(constant_fields, cls, field);
}

PollutionReport analyze(std::span<const ClassDef> classpath) {
    PollutionReport r;
    std::map<std::string, std::string> super_of;
    for (const auto& c : classpath) {
        if (c.superclass) super_of[c.name] = *c.superclass;
        for (const auto& f : c.fields) {
            if (!f.is_static()) continue;
            FieldKey key{c.name, f.name};
            if (f.is_constant()) {
                r.constant_fields.insert(key);
                continue;
            }
            std::optional<PollutionReason> why;
            if (!f.is_final) {
                why = PollutionReason::MutableStatic;
            } else if (f.type == FieldType::Ref) {
                why = PollutionReason::FinalReference;
            }
            if (!why) continue;
            r.flagged_fields.insert(key);
            r.reasons.emplace(key, *why);
            r.flagged_classes.insert(c.name);
        }
    }
    for (const auto& c : classpath) {
        // Bounded walk: a cyclic chain is rejected later by the linker.
        std::string cur = c.name;
        for (std::size_t hops = 0; hops <= classpath.size(); ++hops) {
            if (r.flagged_classes.count(cur)) {
                r.guard_targets.insert(c.name);
                break;
            }
            auto it = super_of.find(cur);
            if (it == super_of.end()) break;
            cur = it->second;
        }
    }
    return r;
}

}  // namespace patchvm
