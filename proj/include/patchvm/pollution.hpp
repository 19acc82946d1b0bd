#pragma once

#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>

#include "patchvm/classfile.hpp"

namespace patchvm {

enum class PollutionReason : std::uint8_t { MutableStatic, FinalReference };

std::string_view to_string(PollutionReason r);

using FieldKey = std::pair<std::string, std::string>;  // (class, field)

struct PollutionReport {
    std::set<std::string> flagged_classes;
    std::set<FieldKey> flagged_fields;
    std::map<FieldKey, PollutionReason> reasons;
    /// Classes whose triggers need a reinit guard: flagged classes and every
    /// class that extends one.
    std::set<std::string> guard_targets;
    /// Constant variables of the classpath; reading them triggers nothing.
    std::set<FieldKey> constant_fields;

    bool is_flagged(std::string_view cls) const;
    bool is_flagged(std::string_view cls, std::string_view field) const;
    bool is_guard_target(std::string_view cls) const;
    bool is_constant(std::string_view cls, std::string_view field) const;

    bool operator==(const PollutionReport&) const = default;
};

/// Flags static non-final fields and static final `ref` fields.
PollutionReport analyze(std::span<const ClassDef> classpath);

}  // namespace patchvm
