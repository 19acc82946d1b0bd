#include "vm/session_state.hpp"

namespace patchvm::detail {
namespace {

void restore_and_run(Interpreter& in, int cls) {
    SessionState& s = in.session();
    // A never-initialized class gets its VM-level initialization here; its
    // delegating `<clinit>` sees the flag already set and does nothing.
    in.ensure_initialized(cls);
    const LinkedClass& lc = s.classes[cls];
    auto& statics = s.class_state[cls].statics;
    for (std::size_t i = 0; i < lc.statics.size(); ++i) {
        if (!lc.statics[i].constant) statics[i] = default_value(lc.statics[i].type);
    }
    s.epoch.reinit_trace.push_back(lc.name);
    in.call(cls, lc.renamed_clinit, {});
}

}  // namespace

void guard_reinit(Interpreter& in, int cls) {
    SessionState& s = in.session();
    auto& rt = s.epoch;
    const int sup = s.classes[cls].super;
    if (!rt.guarded[cls]) {
        if (sup >= 0) guard_reinit(in, sup);
        return;
    }
    if (rt.reinit_flags[cls]) return;
    if (sup >= 0) guard_reinit(in, sup);
    // The superclass initializer may have triggered this class already.
    if (rt.reinit_flags[cls]) return;
    rt.reinit_flags[cls] = 1;
    restore_and_run(in, cls);
}

void eager_reinit(Interpreter& in, const std::vector<int>& classes) {
    SessionState& s = in.session();
    for (int c : classes) s.epoch.reinit_flags[c] = 1;
    for (int c : classes) restore_and_run(in, c);
}

}  // namespace patchvm::detail
