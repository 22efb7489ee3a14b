#pragma once

// Pipeline configuration: one flat struct covering windowing, model,
// training, scoring, thresholding and pruning knobs, loadable from a JSON
// object or key=value lines.  Unknown keys are rejected.

#include "tsgad/detection.hpp"
#include "tsgad/nets.hpp"
#include "tsgad/scoring.hpp"
#include "tsgad/timeseries.hpp"

#include <cstdint>
#include <string>

namespace tsgad {

struct TrainConfig {
    int batch_size = 64;
    int iterations = 2000;
    int n_critic = 5;
    double learning_rate = 0.0005;
    double gp_weight = 10.0;
    double beta1 = 0.5;
    double beta2 = 0.9;
};

struct PipelineConfig {
    // signal preparation
    int window_size = 100;
    int step_size = 1;
    int target_length = 10000;  // capped at the series length
    bool detrend = false;

    // model
    int latent_dim = 20;
    nn::NetworkSpec network;
    TrainConfig train;

    // scoring
    ErrorConfig error;
    FusionConfig fusion;
    SmoothMode smooth = SmoothMode::density_mode;

    // detection
    ThresholdConfig threshold;
    PruneConfig prune_cfg;
    int merge_gap = 0;

    std::uint64_t seed = 0;

    void validate() const;
};

ErrorMethod parse_error_method(const std::string& s);
FusionMode parse_fusion_mode(const std::string& s);
std::string to_string(ErrorMethod m);
std::string to_string(FusionMode m);

// Applies keys from a config file on top of `base`.  Accepts a JSON object
// or `key = value` lines (# comments allowed).
PipelineConfig load_config_file(const std::string& path, const PipelineConfig& base = {});
PipelineConfig parse_config_text(const std::string& text, const PipelineConfig& base = {});

}  // namespace tsgad
