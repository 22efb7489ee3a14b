#pragma once

// Converts a fused score series into anomalous sequences: locally adaptive
// sliding-window thresholding, maximal-run extraction, and peak-score based
// pruning of probable false positives.

#include <Eigen/Dense>

#include <vector>

namespace tsgad {

struct ThresholdConfig {
    double window_fraction = 1.0 / 3.0;
    double step_fraction = 1.0 / 30.0;
    double sigmas = 4.0;
};

struct AnomalousSequence {
    int start = 0;  // inclusive indices into the score series
    int end = 0;    // inclusive
    double max_score = 0.0;
};

struct PruneConfig {
    double theta = 0.1;
};

// Flags points exceeding mean + sigmas*std of any sliding window covering
// them (OR across windows); partial windows cover the series tail.
std::vector<bool> adaptive_threshold(const Eigen::VectorXd& scores,
                                     const ThresholdConfig& cfg);

// Maximal runs of flagged points; max_score comes from `scores`.
std::vector<AnomalousSequence> extract_sequences(const std::vector<bool>& mask,
                                                 const Eigen::VectorXd& scores);

// Sorts peak scores descending, computes relative drops p_i, and removes
// every sequence from the first rank whose drop is <= theta onward.  If all
// peaks are not positive, pruning is skipped.
std::vector<AnomalousSequence> prune(const std::vector<AnomalousSequence>& seqs,
                                     const PruneConfig& cfg);

// Optional gap merging (default off in the pipeline): joins sequences
// separated by at most `gap` normal points.
std::vector<AnomalousSequence> merge_gaps(const std::vector<AnomalousSequence>& seqs,
                                          int gap, const Eigen::VectorXd& scores);

}  // namespace tsgad
