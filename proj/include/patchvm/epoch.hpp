#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "patchvm/test_id.hpp"

namespace patchvm {

/// Per-session reinitialization status table. Indexed by the class ordinal
/// the session assigned at link time; only guarded (reset-transformed,
/// flagged) classes ever have their flag consulted.
struct EpochRuntime {
    std::vector<std::uint8_t> reinit_flags;
    std::vector<std::uint8_t> guarded;
    std::vector<std::string> class_names;
    std::optional<TestId> custom_hook;
    /// Debug only: reinitialize every initialized guarded class at reset time
    /// in name order instead of on first trigger. Breaks initializer
    /// dependencies on purpose.
    bool eager_reinit = false;
    std::uint64_t epoch = 0;
    /// Classes whose `uniapr_clinit` ran in the current epoch, in order.
    std::vector<std::string> reinit_trace;

    std::optional<std::size_t> ordinal(std::string_view cls) const;
    bool flag(std::string_view cls) const;
    std::vector<std::string> guarded_classes() const;
};

}  // namespace patchvm
