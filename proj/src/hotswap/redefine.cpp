#include <map>

#include "patchvm/hotswap.hpp"
#include "vm/session_state.hpp"

namespace patchvm {
namespace {

void check_compatible(const ClassDef& old_def, const ClassDef& new_def) {
    if (layout_signature(old_def) != layout_signature(new_def)) {
        throw LayoutChangeError("layout of " + new_def.name + " changed: " +
                                describe(layout_signature(old_def)) + " -> " +
                                describe(layout_signature(new_def)));
    }
    if (old_def.instrumented != new_def.instrumented) {
        throw LayoutChangeError("instrumentation marker of " + new_def.name + " differs");
    }
    for (std::size_t i = 0; i < old_def.methods.size(); ++i) {
        if (old_def.methods[i].returns_value() != new_def.methods[i].returns_value()) {
            throw LayoutChangeError("method " + new_def.name + "." + new_def.methods[i].name +
                                    " changes whether it returns a value");
        }
    }
}

struct Staged {
    int index;
    std::shared_ptr<const ClassDef> def;
    std::vector<detail::LinkedMethod> methods;
};

}  // namespace

std::vector<SwapReceipt> redefine(VmSession& s, std::span<const ClassDef> new_defs) {
    if (!s.alive()) throw DeadSession();
    auto& st = s.state();

    std::vector<SwapReceipt> receipts;
    std::vector<Staged> staged;
    std::map<int, std::size_t> latest;  // class -> position in `staged`
    for (const auto& def : new_defs) {
        int c = st.find_class(def.name);
        if (c < 0) throw UnknownClassError("cannot redefine unknown class " + def.name);
        auto it = latest.find(c);
        const ClassDef& live = it == latest.end() ? *st.classes[c].def : *staged[it->second].def;
        check_compatible(live, def);
        receipts.push_back(SwapReceipt{def.name, live});
        auto ptr = std::make_shared<const ClassDef>(def);
        // Callee shapes are unchanged, so linking against the live table is exact.
        auto methods = detail::link_methods(st, *ptr, c);
        latest[c] = staged.size();
        staged.push_back(Staged{c, std::move(ptr), std::move(methods)});
    }
    for (auto& item : staged) {
        auto& lc = st.classes[item.index];
        lc.def = std::move(item.def);
        lc.methods = std::move(item.methods);
    }
    return receipts;
}

void restore(VmSession& s, const std::vector<SwapReceipt>& receipts) {
    std::vector<ClassDef> defs;
    defs.reserve(receipts.size());
    for (auto it = receipts.rbegin(); it != receipts.rend(); ++it) defs.push_back(it->old_def);
    redefine(s, defs);
}

}  // namespace patchvm
