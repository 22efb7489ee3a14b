#include "tsgad/evaluation.hpp"

#include "tsgad/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

namespace tsgad {

namespace {

bool overlaps(double s1, double e1, double s2, double e2) {
    return s1 <= e2 && s2 <= e1;  // closed intervals
}

}  // namespace

ConfusionCounts confusion(const GroundTruthWindows& truth,
                          const std::vector<PredictedWindow>& pred) {
    ConfusionCounts c;
    for (const auto& [ts, te] : truth.windows) {
        bool hit = false;
        for (const auto& p : pred)
            if (overlaps(ts, te, p.start, p.end)) {
                hit = true;
                break;
            }
        hit ? ++c.tp : ++c.fn;
    }
    for (const auto& p : pred) {
        bool hit = false;
        for (const auto& [ts, te] : truth.windows)
            if (overlaps(ts, te, p.start, p.end)) {
                hit = true;
                break;
            }
        if (!hit) ++c.fp;
    }
    return c;
}

Metrics prf1(const ConfusionCounts& c) {
    Metrics m;
    if (c.tp + c.fp > 0) m.precision = double(c.tp) / double(c.tp + c.fp);
    if (c.tp + c.fn > 0) m.recall = double(c.tp) / double(c.tp + c.fn);
    if (m.precision + m.recall > 0.0)
        m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
    return m;
}

EvalReport summarize(const std::string& variant, std::vector<SignalResult> results) {
    EvalReport r;
    r.variant = variant;
    r.signals = std::move(results);
    for (const auto& s : r.signals) {
        auto& d = r.datasets[s.dataset];
        ++d.signals;
        if (s.failed) {
            ++d.failures;
            continue;
        }
        d.pooled += s.counts;
        d.macro_f1 += s.metrics.f1;
    }
    for (auto& [name, d] : r.datasets) {
        d.micro = prf1(d.pooled);
        const int ok = d.signals - d.failures;
        d.macro_f1 = ok > 0 ? d.macro_f1 / ok : 0.0;
    }
    return r;
}

double EvalReport::mean_f1() const {
    if (datasets.empty()) return 0.0;
    double s = 0.0;
    for (const auto& [_, d] : datasets) s += d.micro.f1;
    return s / double(datasets.size());
}

double EvalReport::std_f1() const {
    if (datasets.empty()) return 0.0;
    const double m = mean_f1();
    double s = 0.0;
    for (const auto& [_, d] : datasets) s += (d.micro.f1 - m) * (d.micro.f1 - m);
    return std::sqrt(s / double(datasets.size()));
}

void write_report_csv(const std::vector<EvalReport>& reports, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw DataError("cannot write report: " + path);
    std::set<std::string> datasets;
    for (const auto& r : reports)
        for (const auto& [name, _] : r.datasets) datasets.insert(name);
    f << "variant";
    for (const auto& d : datasets) f << ',' << d << "_micro_f1," << d << "_macro_f1";
    f << ",mean_f1,std_f1\n";
    f.precision(6);
    f << std::fixed;
    for (const auto& r : reports) {
        f << r.variant;
        for (const auto& d : datasets) {
            auto it = r.datasets.find(d);
            if (it == r.datasets.end())
                f << ",,";
            else
                f << ',' << it->second.micro.f1 << ',' << it->second.macro_f1;
        }
        f << ',' << r.mean_f1() << ',' << r.std_f1() << '\n';
    }
}

}  // namespace tsgad
