#pragma once

// Window-overlap scoring of detections against ground truth, plus the
// report structures used by the benchmark and ablation runners.

#include "tsgad/detection.hpp"
#include "tsgad/timeseries.hpp"

#include <map>
#include <string>
#include <vector>

namespace tsgad {

struct ConfusionCounts {
    int tp = 0, fp = 0, fn = 0;

    ConfusionCounts& operator+=(const ConfusionCounts& o) {
        tp += o.tp;
        fp += o.fp;
        fn += o.fn;
        return *this;
    }
};

struct Metrics {
    double precision = 0.0, recall = 0.0, f1 = 0.0;
};

// Predicted intervals in the same (timestamp) units as the ground truth.
struct PredictedWindow {
    double start = 0.0, end = 0.0;
};

// Per-truth-window counting: each truth window overlapping >= 1 prediction
// is one TP, otherwise one FN; each prediction overlapping no truth window
// is one FP.  Intervals are closed.
ConfusionCounts confusion(const GroundTruthWindows& truth,
                          const std::vector<PredictedWindow>& pred);

Metrics prf1(const ConfusionCounts& c);

struct SignalResult {
    std::string dataset, signal, variant;
    ConfusionCounts counts;
    Metrics metrics;
    bool failed = false;
    std::string error;
};

struct DatasetSummary {
    ConfusionCounts pooled;
    Metrics micro;       // prf1 of pooled counts
    double macro_f1 = 0.0;  // mean of per-signal F1
    int signals = 0, failures = 0;
};

struct EvalReport {
    std::string variant;
    std::vector<SignalResult> signals;
    std::map<std::string, DatasetSummary> datasets;

    double mean_f1() const;  // mean of per-dataset micro F1
    double std_f1() const;   // population std of per-dataset micro F1
};

EvalReport summarize(const std::string& variant, std::vector<SignalResult> results);

// Report CSV: rows = variants, columns = datasets + Mean+-Std.
void write_report_csv(const std::vector<EvalReport>& reports, const std::string& path);

}  // namespace tsgad
