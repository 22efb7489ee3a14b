#pragma once

// Trained model bundle: the four networks plus everything needed to rerun
// preprocessing and scoring on new data.  Persisted as a directory with
// spec.json, one binary tensor file per network, and training_log.csv.

#include "tsgad/config.hpp"
#include "tsgad/train.hpp"

#include <string>

namespace tsgad {

using real_t = float;  // training/inference precision

struct ModelBundle {
    nn::GanModel<real_t> model;
    std::vector<nn::TrainLogRow> training_log;
    NormParams norm;
    WindowConfig window_cfg;
    int target_length = 0;
    bool detrended = false;
    nn::NetworkSpec spec;
    TrainConfig train_cfg;
    std::uint64_t seed = 0;
};

// Trains on an already prepared (aggregated/normalized/detrended) series.
ModelBundle train_bundle(const TimeSeries& prepared, const NormParams& norm,
                         const PipelineConfig& cfg);

void save_bundle(const ModelBundle& bundle, const std::string& dir);
ModelBundle load_bundle(const std::string& dir);

// Reconstructions and critic scores for every window, dropout disabled.
struct InferenceResult {
    std::vector<Eigen::MatrixXd> reconstructions;  // one t x M matrix per window
    std::vector<double> critic_scores;             // Cx applied to the real windows
};
InferenceResult reconstruct_windows(const ModelBundle& bundle, const WindowSet& windows,
                                    int batch_size = 128);

}  // namespace tsgad
