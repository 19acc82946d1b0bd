#include <algorithm>

#include "patchvm/reset.hpp"
#include "vm/session_state.hpp"

namespace patchvm {

TestOutcome ensure_reinit(VmSession& s, std::string_view cls, const Budgets& budgets) {
    if (!s.alive()) throw DeadSession();
    auto& st = s.state();
    int c = st.find_class(cls);
    if (c < 0) throw UnknownClassError("unknown class " + std::string(cls));
    return detail::run_guarded(st, budgets, [c](detail::Interpreter& in) { detail::guard_reinit(in, c); });
}

void reset_epoch(VmSession& s, const Budgets& hook_budgets) {
    if (!s.alive()) throw DeadSession();
    auto& st = s.state();
    auto& rt = st.epoch;
    std::fill(rt.reinit_flags.begin(), rt.reinit_flags.end(), 0);
    rt.reinit_trace.clear();
    ++rt.epoch;
    st.registry.clear();

    if (rt.eager_reinit) {
        std::vector<int> eager;
        for (const auto& name : rt.guarded_classes()) {
            int c = st.find_class(name);
            if (st.class_state[c].initialized) eager.push_back(c);
        }
        auto out = detail::run_guarded(st, hook_budgets,
                                       [&eager](detail::Interpreter& in) { detail::eager_reinit(in, eager); });
        if (!out.passed()) throw HarnessError("eager reinitialization failed: " + out.detail);
    }

    if (rt.custom_hook) {
        TestOutcome out;
        try {
            out = s.run_test(*rt.custom_hook, hook_budgets);
        } catch (const UnknownTestError& e) {
            throw HarnessError(std::string("reset hook: ") + e.what());
        }
        if (!out.passed()) {
            throw HarnessError("reset hook " + rt.custom_hook->str() + " returned " +
                               std::string(to_string(out.verdict)) + ": " + out.detail);
        }
    }
}

}  // namespace patchvm
