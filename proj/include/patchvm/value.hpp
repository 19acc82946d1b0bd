#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace patchvm {

/// Handle into the session heap.
struct Ref {
    std::uint32_t id = 0;
    bool operator==(const Ref&) const = default;
};

using Value = std::variant<std::monostate, std::int64_t, double, bool, std::string, Ref>;

struct Instance {
    std::uint32_t class_index = 0;
    std::vector<Value> fields;
    bool operator==(const Instance&) const = default;
};

struct ListObject {
    std::vector<Value> items;
    bool operator==(const ListObject&) const = default;
};

using HeapCell = std::variant<Instance, ListObject>;

}  // namespace patchvm
