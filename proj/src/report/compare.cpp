#include <algorithm>
#include <cstdio>
#include <map>

#include <json.hpp>

#include "patchvm/report.hpp"

namespace patchvm {

std::string format_fixed(double value, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
    return buf;
}

std::string DivergenceReport::ratio_percent() const { return format_fixed(ratio() * 100.0, 2) + "%"; }

namespace {

void require_same_corpus(const RunReport& a, const RunReport& b) {
    if (a.digest != b.digest) {
        throw DigestMismatchError("reports cover different corpora (digest " + a.digest + " vs " + b.digest + ")");
    }
}

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

std::vector<double> patch_times(const RunReport& r) {
    std::vector<double> out;
    for (const auto& p : r.patches) out.push_back(p.wall_ms);
    return out;
}

}  // namespace

DivergenceReport compare_reports(const RunReport& a, const RunReport& b) {
    require_same_corpus(a, b);
    std::map<std::string, ValidationStatus> b_status;
    for (const auto& p : b.patches) b_status[p.id] = p.status;
    DivergenceReport d;
    d.total = a.patches.size();
    for (const auto& p : a.patches) {
        auto it = b_status.find(p.id);
        ValidationStatus other = it == b_status.end() ? ValidationStatus::Unknown : it->second;
        if (other != p.status) d.entries.push_back(Divergence{p.id, p.status, other});
    }
    d.mismatch_count = d.entries.size();
    return d;
}

std::string to_json(const DivergenceReport& d) {
    nlohmann::ordered_json doc;
    doc["schema"] = "patchvm.divergence-report/1";
    auto entries = nlohmann::ordered_json::array();
    for (const auto& e : d.entries) {
        entries.push_back({{"id", e.id}, {"status_a", to_string(e.status_a)}, {"status_b", to_string(e.status_b)}});
    }
    doc["divergences"] = entries;
    doc["mismatch_count"] = d.mismatch_count;
    doc["total"] = d.total;
    doc["ratio"] = d.ratio();
    doc["ratio_percent"] = d.ratio_percent();
    return doc.dump(2) + "\n";
}

std::string SpeedupRecord::formatted() const { return format_fixed(speedup, 1); }

SpeedupRecord timing_summary(double total_ms_a, double total_ms_b) {
    SpeedupRecord s;
    s.speedup = total_ms_b > 0.0 ? total_ms_a / total_ms_b : 0.0;
    return s;
}

SpeedupRecord timing_summary(const RunReport& a, const RunReport& b) {
    require_same_corpus(a, b);
    SpeedupRecord s = timing_summary(a.total_wall_ms, b.total_wall_ms);
    s.median_patch_ms_a = median(patch_times(a));
    s.median_patch_ms_b = median(patch_times(b));
    return s;
}

}  // namespace patchvm
