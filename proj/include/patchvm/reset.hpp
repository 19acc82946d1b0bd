#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "patchvm/classfile.hpp"
#include "patchvm/pollution.hpp"
#include "patchvm/vm.hpp"

namespace patchvm {

/// Makes `c` re-initializable at application level:
///  - a flagged class's `<clinit>` body moves to `uniapr_clinit` and
///    `<clinit>` becomes `guard <c>` (flagged classes without an initializer
///    get an empty `uniapr_clinit`);
///  - `final` is cleared on flagged fields;
///  - `guard D` is inserted before every trigger on a guard target D, except
///    reads of constant variables.
/// The result is marked `instrumented`. Throws AlreadyTransformedError.
ClassDef transform(const ClassDef& c, const PollutionReport& report);

std::vector<ClassDef> transform_all(std::span<const ClassDef> classes, const PollutionReport& report);

/// Runs the epoch guard for `cls` outside of any test (superclasses first,
/// once per epoch).
TestOutcome ensure_reinit(VmSession& s, std::string_view cls, const Budgets& budgets = {});

/// Starts a new epoch: clears reinit flags and the registry, then runs the
/// custom hook if one is configured. Throws HarnessError if the hook does not
/// pass, DeadSession on a dead session.
void reset_epoch(VmSession& s, const Budgets& hook_budgets = {});

}  // namespace patchvm
