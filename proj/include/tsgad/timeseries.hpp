#pragma once

// Signal ingestion and preparation: CSV loading, resampling onto a uniform
// grid, [-1,1] normalization, linear detrending, and sliding windows.

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace tsgad {

struct TimeSeries {
    std::vector<double> timestamps;  // strictly increasing
    Eigen::MatrixXd values;          // T x M
    std::vector<std::string> channel_names;

    Eigen::Index length() const { return values.rows(); }
    Eigen::Index channels() const { return values.cols(); }
};

struct GroundTruthWindows {
    std::vector<std::pair<double, double>> windows;  // [start, end], sorted by start
};

struct WindowConfig {
    int window_size = 100;
    int step_size = 1;
};

struct WindowSet {
    std::vector<Eigen::MatrixXd> windows;  // each t x M
    std::vector<int> start_indices;

    std::size_t count() const { return windows.size(); }
};

struct NormParams {
    Eigen::VectorXd min;  // per channel
    Eigen::VectorXd max;
};

// CSV with optional header; columns timestamp,value or timestamp,ch1..chM.
TimeSeries load_signal(const std::string& path);
// Parses the same CSV format from an in-memory string (used by bindings/tests).
TimeSeries parse_signal_csv(const std::string& text, const std::string& origin = "<memory>");
void save_signal(const TimeSeries& ts, const std::string& path);

// Labels JSON: [[start, end], ...] in signal timestamp units.
GroundTruthWindows load_labels(const std::string& path);
void save_labels(const GroundTruthWindows& gt, const std::string& path);

// Resamples onto target_length equally spaced grid points spanning the
// original range; each grid point takes the mean of the samples nearest to
// it, empty grid points are filled by linear interpolation (nearest value at
// the edges).
TimeSeries aggregate(const TimeSeries& ts, int target_length);

std::pair<TimeSeries, NormParams> normalize(const TimeSeries& ts);
TimeSeries denormalize(const TimeSeries& ts, const NormParams& params);
// Applies stored parameters to new data (same affine map as `normalize`).
TimeSeries apply_normalization(const TimeSeries& ts, const NormParams& params);

// Subtracts the per-channel least-squares line fit on (index, value).
TimeSeries detrend(const TimeSeries& ts);

WindowSet make_windows(const TimeSeries& ts, const WindowConfig& cfg);

}  // namespace tsgad
