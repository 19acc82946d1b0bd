#include <algorithm>

#include "patchvm/epoch.hpp"

namespace patchvm {

std::optional<std::size_t> EpochRuntime::ordinal(std::string_view cls) const {
    auto it = std::find(class_names.begin(), class_names.end(), cls);
    if (it == class_names.end()) return std::nullopt;
    return static_cast<std::size_t>(it - class_names.begin());
}

bool EpochRuntime::flag(std::string_view cls) const {
    auto i = ordinal(cls);
    return i && reinit_flags[*i] != 0;
}

std::vector<std::string> EpochRuntime::guarded_classes() const {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < class_names.size(); ++i) {
        if (guarded[i]) out.push_back(class_names[i]);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace patchvm
