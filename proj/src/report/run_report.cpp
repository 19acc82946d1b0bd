#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "patchvm/report.hpp"

namespace patchvm {
namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

bool ReportConfig::operator==(const ReportConfig& o) const {
    return mode == o.mode && budgets.steps == o.budgets.steps && budgets.allocs == o.budgets.allocs &&
           failing_tests == o.failing_tests && reset_hook == o.reset_hook && seed == o.seed &&
           classpath == o.classpath && tests == o.tests && pool == o.pool;
}

StatusMap RunReport::status_map() const {
    StatusMap m;
    for (const auto& p : patches) m[p.id] = StatusEntry{p.status, p.failing_test, p.tests_executed};
    return m;
}

RunReport make_report(const ValidationResult& result, const ReportConfig& config, std::string digest) {
    RunReport r;
    r.config = config;
    r.digest = std::move(digest);
    for (const auto& t : result.telemetry) {
        const StatusEntry& e = result.statuses.at(t.id);
        r.patches.push_back(PatchRecord{t.id, e.status, e.failing_test, e.tests_executed, t.steps, t.wall_ms});
    }
    r.total_wall_ms = result.total_wall_ms;
    r.sessions_created = result.sessions_created;
    for (const auto& [key, reason] : result.pollution.reasons) {
        r.pollution.push_back(PollutionRow{key.first, key.second, std::string(to_string(reason))});
    }
    return r;
}

namespace {

json test_or_null(const std::optional<TestId>& t) { return t ? json(t->str()) : json(nullptr); }

std::optional<TestId> test_from(const json& j) {
    if (j.is_null()) return std::nullopt;
    return TestId::parse(j.get<std::string>());
}

}  // namespace

std::string to_json(const RunReport& r) {
    json failing = json::array();
    for (const auto& t : r.config.failing_tests) failing.push_back(t.str());
    json doc;
    doc["schema"] = kReportSchema;
    doc["config"] = {
        {"mode", to_string(r.config.mode)},
        {"step_budget", r.config.budgets.steps},
        {"alloc_budget", r.config.budgets.allocs},
        {"failing_tests", failing},
        {"reset_hook", test_or_null(r.config.reset_hook)},
        {"seed", r.config.seed},
        {"classpath", r.config.classpath},
        {"tests", r.config.tests},
        {"pool", r.config.pool},
    };
    doc["digest"] = r.digest;
    json patches = json::array();
    for (const auto& p : r.patches) {
        patches.push_back({
            {"id", p.id},
            {"status", to_string(p.status)},
            {"failing_test", test_or_null(p.failing_test)},
            {"tests_executed", p.tests_executed},
            {"steps", p.steps},
            {"wall_ms", p.wall_ms},
        });
    }
    doc["patches"] = patches;
    doc["totals"] = {
        {"patches", r.patches.size()},
        {"wall_ms", r.total_wall_ms},
        {"sessions_created", r.sessions_created},
    };
    json pollution = json::array();
    for (const auto& row : r.pollution) {
        pollution.push_back({{"class", row.class_name}, {"field", row.field}, {"reason", row.reason}});
    }
    doc["pollution"] = pollution;
    return doc.dump(2) + "\n";
}

RunReport report_from_json(std::string_view text) {
    try {
        json doc = json::parse(text);
        if (doc.at("schema").get<std::string>() != kReportSchema) {
            throw ConfigError("unsupported report schema " + doc.at("schema").get<std::string>());
        }
        RunReport r;
        const json& cfg = doc.at("config");
        r.config.mode = parse_mode(cfg.at("mode").get<std::string>());
        r.config.budgets.steps = cfg.at("step_budget").get<std::uint64_t>();
        r.config.budgets.allocs = cfg.at("alloc_budget").get<std::uint64_t>();
        for (const auto& t : cfg.at("failing_tests")) r.config.failing_tests.push_back(TestId::parse(t.get<std::string>()));
        r.config.reset_hook = test_from(cfg.at("reset_hook"));
        r.config.seed = cfg.at("seed").get<std::uint64_t>();
        r.config.classpath = cfg.at("classpath").get<std::string>();
        r.config.tests = cfg.at("tests").get<std::string>();
        r.config.pool = cfg.at("pool").get<std::string>();
        r.digest = doc.at("digest").get<std::string>();
        for (const auto& p : doc.at("patches")) {
            r.patches.push_back(PatchRecord{
                p.at("id").get<std::string>(),
                parse_status(p.at("status").get<std::string>()),
                test_from(p.at("failing_test")),
                p.at("tests_executed").get<std::size_t>(),
                p.at("steps").get<std::uint64_t>(),
                p.at("wall_ms").get<double>(),
            });
        }
        const json& totals = doc.at("totals");
        r.total_wall_ms = totals.at("wall_ms").get<double>();
        r.sessions_created = totals.at("sessions_created").get<std::size_t>();
        for (const auto& row : doc.at("pollution")) {
            r.pollution.push_back(PollutionRow{row.at("class").get<std::string>(), row.at("field").get<std::string>(),
                                               row.at("reason").get<std::string>()});
        }
        return r;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed run report: ") + e.what());
    }
}

RunReport load_report(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read report " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return report_from_json(buf.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

std::string to_csv(const RunReport& r) {
    std::string out(kCsvHeader);
    out += '\n';
    for (const auto& p : r.patches) {
        out += p.id + ',' + std::string(to_string(p.status)) + ',' + (p.failing_test ? p.failing_test->str() : "") +
               ',' + std::to_string(p.tests_executed) + ',' + std::to_string(p.steps) + ',' +
               format_fixed(p.wall_ms, 3) + '\n';
    }
    return out;
}

void write_file_atomic(const fs::path& path, std::string_view content) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out.flush()) throw ConfigError("cannot write " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw ConfigError("cannot move report into place at " + path.string());
    }
}

}  // namespace patchvm
