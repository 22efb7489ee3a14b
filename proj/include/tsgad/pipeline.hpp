#pragma once

// End-to-end composition: preprocessing, training, detection, artifact
// writers, and the benchmark / ablation runners over signal manifests.

#include "tsgad/config.hpp"
#include "tsgad/evaluation.hpp"
#include "tsgad/model.hpp"

#include <string>
#include <vector>

namespace tsgad {

struct Prepared {
    TimeSeries series;  // normalized (and optionally aggregated/detrended)
    NormParams norm;
};

// normalize to [-1,1], aggregate onto at most target_length grid points,
// then optionally detrend.
Prepared preprocess(const TimeSeries& raw, const PipelineConfig& cfg);
// Same steps with the normalization parameters a trained bundle stored.
TimeSeries preprocess_like(const TimeSeries& raw, const ModelBundle& bundle);

ModelBundle train_pipeline(const TimeSeries& raw, const PipelineConfig& cfg);

struct DetectionOutput {
    std::vector<double> timestamps;         // post-aggregation grid
    Eigen::VectorXd x, x_hat;               // first channel, normalized units
    Eigen::VectorXd err, critic_raw, critic_smoothed, z_re, z_c, fused;
    std::vector<AnomalousSequence> anomalies;
};

DetectionOutput detect_pipeline(const TimeSeries& raw, const ModelBundle& bundle,
                                const PipelineConfig& cfg);

void write_scores_csv(const DetectionOutput& out, const std::string& path);
void write_anomalies_json(const DetectionOutput& out, const std::string& path);
std::vector<PredictedWindow> load_anomalies_json(const std::string& path);

// Converts detected index ranges to timestamp intervals.
std::vector<PredictedWindow> to_predicted_windows(const DetectionOutput& out);

struct ManifestEntry {
    std::string dataset, signal_csv, labels_json;
};
std::vector<ManifestEntry> load_manifest(const std::string& path);

// Trains (or reuses a cached model), detects and scores each signal.
// Results are cached under out_dir/<dataset>/<signal>/ and reused on rerun;
// per-signal failures are recorded, never fatal.
EvalReport run_benchmark(const std::vector<ManifestEntry>& manifest,
                         const PipelineConfig& cfg, const std::string& out_dir,
                         int jobs = 1);

// One trained model per signal, re-scored under all ten scoring variants.
std::vector<EvalReport> run_ablation(const std::vector<ManifestEntry>& manifest,
                                     const PipelineConfig& cfg, const std::string& out_dir,
                                     int jobs = 1);

const std::vector<std::string>& ablation_variants();
// Applies a variant name (e.g. "product_dtw") onto a base config.
PipelineConfig variant_config(const PipelineConfig& base, const std::string& variant);

// Number of model trainings since process start (ablation reuse contract).
long train_call_count();

}  // namespace tsgad
