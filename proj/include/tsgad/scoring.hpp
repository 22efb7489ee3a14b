#pragma once

// Per-time-step anomaly scores from overlapping window reconstructions and
// critic outputs: median aggregation, three reconstruction-error measures,
// KDE smoothing of critic collections, z-scoring, and score fusion.

#include <Eigen/Dense>

#include <vector>

namespace tsgad {

// collection[j] holds every value contributed to time step j by a window
// covering it.
using StepCollections = std::vector<std::vector<double>>;

enum class ErrorMethod { point, area, dtw };
enum class FusionMode { critic_only, error_only, convex, product };
enum class SmoothMode { density_mode, raw_max };
enum class ZDirection { high_is_anomalous, low_is_anomalous };

struct ErrorConfig {
    ErrorMethod method = ErrorMethod::point;
    int half_window = 10;  // l in the area/dtw local segments
};

struct FusionConfig {
    FusionMode mode = FusionMode::convex;
    double alpha = 0.5;          // convex combination weight
    double product_scale = 1.0;  // scale on the elementwise product
};

// Per-step lower median of each collection (deterministic for even sizes).
Eigen::VectorXd aggregate_reconstructions(const StepCollections& collection);

Eigen::VectorXd error_pointwise(const Eigen::VectorXd& x, const Eigen::VectorXd& x_hat);

// |trapezoidal integral of (x - x_hat) over [t-l, t+l]| divided by the
// actual (truncated at the boundaries) interval length.
Eigen::VectorXd error_area(const Eigen::VectorXd& x, const Eigen::VectorXd& x_hat, int l);

// Dynamic-time-warping distance between the two local segments around each
// step, squared-difference local cost, min over warp paths of sqrt(sum)/K.
Eigen::VectorXd error_dtw(const Eigen::VectorXd& x, const Eigen::VectorXd& x_hat, int l);

// DTW between two arbitrary segments (exposed for the oracle tests).
double dtw_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

// Collapses each step's critic-score collection to one value: the sample
// attaining maximal Gaussian-KDE density (Scott's-rule bandwidth), or the
// raw maximum.
Eigen::VectorXd smooth_critic(const StepCollections& collection,
                              SmoothMode mode = SmoothMode::density_mode);

Eigen::VectorXd zscore(const Eigen::VectorXd& series, ZDirection direction);

Eigen::VectorXd fuse(const Eigen::VectorXd& z_re, const Eigen::VectorXd& z_c,
                     const FusionConfig& cfg);

// Spreads per-window values over the steps each window covers.
StepCollections collect_window_values(const std::vector<double>& window_values,
                                      const std::vector<int>& start_indices,
                                      int window_size, int series_length);

}  // namespace tsgad
