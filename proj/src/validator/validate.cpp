#include <chrono>
#include <map>
#include <set>

#include "patchvm/hotswap.hpp"
#include "patchvm/reset.hpp"
#include "patchvm/validator.hpp"

namespace patchvm {
namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

/// Why `patch` cannot be applied to `base`, if anything. Checked up front so
/// every mode rejects the same patches without consuming a session.
std::optional<std::string> pool_violation(const std::map<std::string, const ClassDef*>& base,
                                          const PatchCandidate& patch) {
    if (patch.malformed) return *patch.malformed;
    if (patch.classes.empty()) return "patch " + patch.id + " contains no classes";
    std::set<std::string> names;
    for (const auto& c : patch.classes) {
        if (!names.insert(c.name).second) return "patch " + patch.id + " defines " + c.name + " twice";
        auto it = base.find(c.name);
        if (it == base.end()) return "patch " + patch.id + " replaces unknown class " + c.name;
        if (layout_signature(*it->second) != layout_signature(c)) {
            return "patch " + patch.id + " changes the layout of " + c.name;
        }
        if (c.instrumented) return "patch " + patch.id + " ships an instrumented class " + c.name;
        for (std::size_t i = 0; i < c.methods.size(); ++i) {
            if (c.methods[i].returns_value() != it->second->methods[i].returns_value()) {
                return "patch " + patch.id + " changes the return shape of " + c.name + "." + c.methods[i].name;
            }
        }
    }
    return std::nullopt;
}

/// Session abandonment after a test-level error.
struct SessionLost {};

class Runner {
public:
    Runner(std::span<const ClassDef> classpath, std::span<const TestId> tests, std::span<const PatchCandidate> pool,
           const RunConfig& cfg)
        : classpath_(classpath.begin(), classpath.end()), pool_(pool), cfg_(cfg) {
        tests_ = order_tests(tests, cfg.failing_tests);
        result_.pollution = analyze(classpath_);
        for (const auto& c : classpath_) base_[c.name] = &c;
        if (cfg.mode == Mode::Reset) live_classpath_ = transform_all(classpath_, result_.pollution);
        else live_classpath_ = classpath_;
    }

    ValidationResult run() {
        const auto start = Clock::now();
        check_tests_exist();
        prepare_patches();
        if (cfg_.mode == Mode::Restart) run_restart();
        else run_on_the_fly();
        result_.total_wall_ms = ms_since(start);
        for (const auto& p : pool_) result_.telemetry.push_back(PatchTelemetry{p.id, steps_[p.id], wall_[p.id]});
        return std::move(result_);
    }

private:
    void check_tests_exist() {
        VmSession probe(live_classpath_);
        for (const auto& t : tests_) require_test(probe, t);
        if (cfg_.reset_hook) require_test(probe, *cfg_.reset_hook);
    }

    static void require_test(const VmSession& s, const TestId& t) {
        const ClassDef* c = s.find_class(t.class_name);
        const MethodDef* m = c ? c->find_method(t.method) : nullptr;
        if (!m || !m->is_static() || m->params != 0 || m->is_clinit()) {
            throw UnknownTestError("test " + t.str() + " is not a static zero-parameter method of the classpath");
        }
    }

    void prepare_patches() {
        for (const auto& p : pool_) {
            StatusEntry& e = result_.statuses[p.id];
            e = StatusEntry{};
            if (auto why = pool_violation(base_, p)) {
                e.status = ValidationStatus::UnknownError;
                continue;
            }
            if (cfg_.mode == Mode::Reset) {
                patched_[p.id] = transform_all(p.classes, result_.pollution);
            } else {
                patched_[p.id] = p.classes;
            }
        }
    }

    VmSession new_session(std::span<const ClassDef> classes) {
        VmSession s(classes);
        ++result_.sessions_created;
        s.epoch().custom_hook = cfg_.reset_hook;
        s.epoch().eager_reinit = cfg_.eager_reinit;
        return s;
    }

    void run_hook(VmSession& s) {
        if (!cfg_.reset_hook) return;
        TestOutcome out = s.run_test(*cfg_.reset_hook, cfg_.budgets);
        if (!out.passed()) {
            throw HarnessError("reset hook " + cfg_.reset_hook->str() + " returned " +
                               std::string(to_string(out.verdict)) + ": " + out.detail);
        }
    }

    /// Runs the ordered suite; returns false when the session must be abandoned.
    bool run_tests(VmSession& s, StatusEntry& e, std::uint64_t& steps) {
        e.status = ValidationStatus::Plausible;
        for (const auto& t : tests_) {
            TestOutcome out = s.run_test(t, cfg_.budgets);
            ++e.tests_executed;
            steps += out.steps_used;
            switch (out.verdict) {
                case Verdict::Pass: continue;
                case Verdict::Fail:
                    e.status = ValidationStatus::NonPlausible;
                    e.failing_test = t;
                    return true;
                case Verdict::Timeout: e.status = ValidationStatus::Timeout; break;
                case Verdict::MemoryError: e.status = ValidationStatus::MemoryError; break;
                case Verdict::VmCrash: e.status = ValidationStatus::UnknownError; break;
            }
            e.failing_test = t;
            return false;
        }
        return true;
    }

    static std::vector<ClassDef> apply(const std::vector<ClassDef>& base, const std::vector<ClassDef>& patch) {
        std::vector<ClassDef> out = base;
        for (const auto& c : patch) {
            for (auto& b : out) {
                if (b.name == c.name) b = c;
            }
        }
        return out;
    }

    void run_restart() {
        for (const auto& p : pool_) {
            StatusEntry& e = result_.statuses[p.id];
            if (e.status != ValidationStatus::Unknown) continue;
            const auto start = Clock::now();
            std::optional<VmSession> s;
            try {
                s.emplace(new_session(apply(live_classpath_, patched_[p.id])));
            } catch (const LinkError&) {
                e.status = ValidationStatus::UnknownError;
            } catch (const VerifyError&) {
                e.status = ValidationStatus::UnknownError;
            }
            if (s) {
                run_hook(*s);
                run_tests(*s, e, steps_[p.id]);
                if (cfg_.after_patch) cfg_.after_patch(p.id, *s);
            }
            wall_[p.id] = ms_since(start);
        }
    }

    void run_on_the_fly() {
        for (;;) {
            std::vector<const PatchCandidate*> pending;
            for (const auto& p : pool_) {
                if (result_.statuses[p.id].status == ValidationStatus::Unknown) pending.push_back(&p);
            }
            if (pending.empty()) return;
            VmSession s = new_session(live_classpath_);
            if (cfg_.mode == Mode::Vanilla) run_hook(s);
            for (const PatchCandidate* p : pending) {
                if (!run_one(s, *p)) break;
            }
        }
    }

    /// False when the session was lost.
    bool run_one(VmSession& s, const PatchCandidate& p) {
        StatusEntry& e = result_.statuses[p.id];
        const auto start = Clock::now();
        std::vector<SwapReceipt> receipts;
        try {
            receipts = redefine(s, patched_[p.id]);
        } catch (const LinkError&) {
            e.status = ValidationStatus::UnknownError;
        } catch (const VerifyError&) {
            e.status = ValidationStatus::UnknownError;
        }
        bool alive = true;
        if (e.status == ValidationStatus::Unknown) {
            if (cfg_.mode == Mode::Reset) reset_epoch(s, cfg_.budgets);
            alive = run_tests(s, e, steps_[p.id]);
            if (alive) restore(s, receipts);
        }
        if (alive && cfg_.after_patch) cfg_.after_patch(p.id, s);
        wall_[p.id] = ms_since(start);
        return alive;
    }

    std::vector<ClassDef> classpath_;
    std::vector<ClassDef> live_classpath_;
    std::span<const PatchCandidate> pool_;
    const RunConfig& cfg_;
    std::vector<TestId> tests_;
    std::map<std::string, const ClassDef*> base_;
    std::map<std::string, std::vector<ClassDef>> patched_;
    std::map<std::string, double> wall_;
    std::map<std::string, std::uint64_t> steps_;
    ValidationResult result_;
};

}  // namespace

ValidationResult validate_pool(std::span<const ClassDef> classpath, std::span<const TestId> tests,
                               std::span<const PatchCandidate> pool, const RunConfig& cfg) {
    std::set<std::string> ids;
    for (const auto& p : pool) {
        if (!ids.insert(p.id).second) throw ConfigError("duplicate patch id " + p.id);
    }
    return Runner(classpath, tests, pool, cfg).run();
}

}  // namespace patchvm
