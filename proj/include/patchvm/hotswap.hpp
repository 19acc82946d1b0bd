#pragma once

#include <span>
#include <string>
#include <vector>

#include "patchvm/classfile.hpp"
#include "patchvm/vm.hpp"

namespace patchvm {

struct SwapReceipt {
    std::string class_name;
    ClassDef old_def;  // live immediately before the swap

    bool operator==(const SwapReceipt&) const = default;
};

/// Replaces method bodies of loaded classes. All-or-nothing: on error the
/// session is unchanged. Statics, init ledger, heap and registry are never
/// touched. Throws UnknownClassError, LayoutChangeError (declarations, a
/// method's value-returning shape, or the instrumented marker differ),
/// LinkError/VerifyError, DeadSession.
std::vector<SwapReceipt> redefine(VmSession& s, std::span<const ClassDef> new_defs);

/// Convenience inverse: swaps every receipt's old definition back in.
void restore(VmSession& s, const std::vector<SwapReceipt>& receipts);

}  // namespace patchvm
