#include <iostream>

#include <CLI11.hpp>

#include "patchvm/corpus.hpp"
#include "patchvm/report.hpp"

namespace fs = std::filesystem;
using namespace patchvm;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitDivergence = 2;

struct ValidateArgs {
    std::string classpath, tests, pool, mode = "restart";
    std::uint64_t step_budget = Budgets{}.steps;
    std::uint64_t alloc_budget = Budgets{}.allocs;
    std::string reset_hook, report, csv;
};

RunReport run_validation(const ValidateArgs& a, bool quiet) {
    ReportConfig rc;
    rc.mode = parse_mode(a.mode);
    rc.budgets = Budgets{a.step_budget, a.alloc_budget};
    rc.classpath = a.classpath;
    rc.tests = a.tests;
    rc.pool = a.pool;
    if (!a.reset_hook.empty()) rc.reset_hook = TestId::parse(a.reset_hook);

    auto classpath = load_classpath(a.classpath);
    auto suite = load_manifest(a.tests);
    auto pool = load_patch_pool(a.pool);
    for (const auto& w : pool.warnings) std::cerr << "warning: " << w << "\n";
    rc.failing_tests = suite.failing;

    RunConfig cfg;
    cfg.mode = rc.mode;
    cfg.budgets = rc.budgets;
    cfg.failing_tests = suite.failing;
    cfg.reset_hook = rc.reset_hook;
    auto result = validate_pool(classpath, suite.tests, pool.candidates, cfg);
    RunReport report = make_report(result, rc, corpus_digest(classpath, suite, pool.candidates));
    if (!quiet) {
        for (const auto& p : report.patches) {
            std::cout << p.id << "  " << to_string(p.status);
            if (p.failing_test) std::cout << "  (" << p.failing_test->str() << ")";
            std::cout << "\n";
        }
        std::cout << report.patches.size() << " patches, " << report.sessions_created << " sessions, "
                  << format_fixed(report.total_wall_ms, 1) << " ms\n";
    }
    return report;
}

int cmd_validate(const ValidateArgs& a) {
    RunReport report = run_validation(a, false);
    if (!a.report.empty()) write_file_atomic(a.report, to_json(report));
    if (!a.csv.empty()) write_file_atomic(a.csv, to_csv(report));
    return kExitOk;
}

int cmd_compare(const std::string& a_path, const std::string& b_path, const std::string& out) {
    RunReport a = load_report(a_path);
    RunReport b = load_report(b_path);
    DivergenceReport d = compare_reports(a, b);
    for (const auto& e : d.entries) {
        std::cout << e.id << "  " << to_string(e.status_a) << " -> " << to_string(e.status_b) << "\n";
    }
    std::cout << d.mismatch_count << " of " << d.total << " patches differ (" << d.ratio_percent() << ")\n";
    if (!out.empty()) write_file_atomic(out, to_json(d));
    return d.mismatch_count > 0 ? kExitDivergence : kExitOk;
}

int cmd_timing(const std::string& a_path, const std::string& b_path) {
    SpeedupRecord s = timing_summary(load_report(a_path), load_report(b_path));
    std::cout << "speedup " << s.formatted() << "x (median patch " << format_fixed(s.median_patch_ms_a, 3) << " ms vs "
              << format_fixed(s.median_patch_ms_b, 3) << " ms)\n";
    return kExitOk;
}

int cmd_gen(const GeneratorConfig& g, const std::string& out) {
    const fs::path dir(out);
    generate_pool(g, dir);
    ValidateArgs a;
    a.classpath = (dir / "classpath").string();
    a.tests = (dir / "tests.manifest").string();
    a.pool = (dir / "patches-pool").string();
    RunReport expected = run_validation(a, true);
    // Paths are recorded relative to the corpus root so the file is relocatable.
    expected.config.classpath = "classpath";
    expected.config.tests = "tests.manifest";
    expected.config.pool = "patches-pool";
    expected.config.seed = g.seed;
    write_file_atomic(dir / "expected.restart.report", to_json(expected));
    std::cout << "wrote " << g.patches << " patches to " << out << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"patchvm: mini-VM patch validation harness"};
    app.require_subcommand(1);

    ValidateArgs va;
    auto* validate = app.add_subcommand("validate", "Validate a patch pool");
    validate->add_option("--classpath", va.classpath, "Directory of .cls files")->required();
    validate->add_option("--tests", va.tests, "Test manifest")->required();
    validate->add_option("--pool", va.pool, "Patch pool directory")->required();
    validate->add_option("--mode", va.mode, "restart|vanilla|reset")->required();
    validate->add_option("--step-budget", va.step_budget, "Steps per test");
    validate->add_option("--alloc-budget", va.alloc_budget, "Allocations per test");
    validate->add_option("--reset-hook", va.reset_hook, "Class.method run at every reset");
    validate->add_option("--report", va.report, "Write the JSON run report here");
    validate->add_option("--csv", va.csv, "Write per-patch CSV rows here");

    std::string a_path, b_path, out_path;
    auto* compare = app.add_subcommand("compare", "Compare two run reports (exit 2 on divergence)");
    compare->add_option("--a", a_path)->required();
    compare->add_option("--b", b_path)->required();
    compare->add_option("--out", out_path, "Write the divergence report here");

    std::string ta, tb;
    auto* timing = app.add_subcommand("timing", "Speedup of report A's wall time over report B's");
    timing->add_option("--a", ta)->required();
    timing->add_option("--b", tb)->required();

    GeneratorConfig g;
    std::string gen_out;
    auto* gen = app.add_subcommand("gen-corpus", "Generate a synthetic corpus");
    gen->add_option("--seed", g.seed)->required();
    gen->add_option("--classes", g.classes)->required();
    gen->add_option("--patches", g.patches)->required();
    gen->add_option("--pollution-rate", g.pollution_rate)->required();
    gen->add_option("--out", gen_out)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitError;
    }

    try {
        if (*validate) return cmd_validate(va);
        if (*compare) return cmd_compare(a_path, b_path, out_path);
        if (*timing) return cmd_timing(ta, tb);
        if (*gen) return cmd_gen(g, gen_out);
    } catch (const patchvm::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitOk;
}
