#include "tsgad/scoring.hpp"

#include "tsgad/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tsgad {

Eigen::VectorXd aggregate_reconstructions(const StepCollections& collection) {
    Eigen::VectorXd out(collection.size());
    for (std::size_t j = 0; j < collection.size(); ++j) {
        auto vals = collection[j];
        if (vals.empty())
            throw DataError("aggregate_reconstructions: step " + std::to_string(j) +
                            " not covered by any window");
        // lower median: element at index (n-1)/2 of the sorted collection
        const std::size_t mid = (vals.size() - 1) / 2;
        std::nth_element(vals.begin(), vals.begin() + mid, vals.end());
        out(static_cast<Eigen::Index>(j)) = vals[mid];
    }
    return out;
}

Eigen::VectorXd error_pointwise(const Eigen::VectorXd& x, const Eigen::VectorXd& x_hat) {
    if (x.size() != x_hat.size()) throw DataError("error_pointwise: length mismatch");
    return (x - x_hat).cwiseAbs();
}

Eigen::VectorXd error_area(const Eigen::VectorXd& x, const Eigen::VectorXd& x_hat, int l) {
    const Eigen::Index T = x.size();
    if (x_hat.size() != T) throw DataError("error_area: length mismatch");
    if (l < 1 || 2 * l >= T) throw ConfigError("error_area: need 0 < 2*l < T");
    Eigen::VectorXd d = x - x_hat;
    // prefix of per-interval trapezoids so each window is O(1)
    Eigen::VectorXd prefix(T);
    prefix(0) = 0.0;
    for (Eigen::Index i = 1; i < T; ++i) prefix(i) = prefix(i - 1) + 0.5 * (d(i - 1) + d(i));
    Eigen::VectorXd out(T);
    for (Eigen::Index t = 0; t < T; ++t) {
        const Eigen::Index a = std::max<Eigen::Index>(0, t - l);
        const Eigen::Index b = std::min<Eigen::Index>(T - 1, t + l);
        out(t) = std::abs(prefix(b) - prefix(a)) / double(b - a);
    }
    return out;
}

double dtw_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    const int n = static_cast<int>(a.size());
    const int m = static_cast<int>(b.size());
    if (n == 0 || m == 0) throw DataError("dtw_distance: empty segment");
    const double inf = std::numeric_limits<double>::infinity();
    const int max_k = n + m - 1;  // longest monotone path
    // best[k](i,j): minimal cost sum over paths of exactly k+1 cells ending
    // at (i,j).  The 1/K * sqrt normalization depends on the path length, so
    // the length is part of the DP state.
    std::vector<Eigen::MatrixXd> best(max_k, Eigen::MatrixXd::Constant(n, m, inf));
    auto w = [&](int i, int j) {
        const double diff = a(i) - b(j);
        return diff * diff;
    };
    best[0](0, 0) = w(0, 0);
    for (int k = 1; k < max_k; ++k) {
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < m; ++j) {
                double prev = inf;
                if (i > 0) prev = std::min(prev, best[k - 1](i - 1, j));
                if (j > 0) prev = std::min(prev, best[k - 1](i, j - 1));
                if (i > 0 && j > 0) prev = std::min(prev, best[k - 1](i - 1, j - 1));
                if (prev < inf) best[k](i, j) = prev + w(i, j);
            }
        }
    }
    double result = inf;
    for (int k = std::max(n, m) - 1; k < max_k; ++k) {
        const double s = best[k](n - 1, m - 1);
        if (s < inf) result = std::min(result, std::sqrt(s) / double(k + 1));
    }
    return result;
}

Eigen::VectorXd error_dtw(const Eigen::VectorXd& x, const Eigen::VectorXd& x_hat, int l) {
    const Eigen::Index T = x.size();
    if (x_hat.size() != T) throw DataError("error_dtw: length mismatch");
    if (l < 1 || 2 * l >= T) throw ConfigError("error_dtw: need 0 < 2*l < T");
    Eigen::VectorXd out(T);
    for (Eigen::Index t = 0; t < T; ++t) {
        const Eigen::Index a = std::max<Eigen::Index>(0, t - l);
        const Eigen::Index b = std::min<Eigen::Index>(T, t + l);  // exclusive
        out(t) = dtw_distance(x.segment(a, b - a), x_hat.segment(a, b - a));
    }
    return out;
}

Eigen::VectorXd smooth_critic(const StepCollections& collection, SmoothMode mode) {
    Eigen::VectorXd out(collection.size());
    for (std::size_t j = 0; j < collection.size(); ++j) {
        const auto& vals = collection[j];
        if (vals.empty())
            throw DataError("smooth_critic: step " + std::to_string(j) + " not covered");
        if (vals.size() == 1) {
            out(static_cast<Eigen::Index>(j)) = vals[0];
            continue;
        }
        if (mode == SmoothMode::raw_max) {
            out(static_cast<Eigen::Index>(j)) = *std::max_element(vals.begin(), vals.end());
            continue;
        }
        const auto n = static_cast<double>(vals.size());
        double mean = 0.0;
        for (double v : vals) mean += v;
        mean /= n;
        double var = 0.0;
        for (double v : vals) var += (v - mean) * (v - mean);
        var /= (n - 1.0);
        const double bandwidth = std::sqrt(var) * std::pow(n, -0.2);  // Scott's rule
        if (bandwidth <= 0.0) {
            out(static_cast<Eigen::Index>(j)) = vals[0];
            continue;
        }
        // density mode over the samples themselves; ties break to the
        // smallest value for determinism
        double best_density = -1.0, best_value = 0.0;
        for (double xi : vals) {
            double dens = 0.0;
            for (double xj : vals) {
                const double u = (xi - xj) / bandwidth;
                dens += std::exp(-0.5 * u * u);
            }
            if (dens > best_density ||
                (dens == best_density && xi < best_value)) {
                best_density = dens;
                best_value = xi;
            }
        }
        out(static_cast<Eigen::Index>(j)) = best_value;
    }
    return out;
}

Eigen::VectorXd zscore(const Eigen::VectorXd& series, ZDirection direction) {
    const double mean = series.mean();
    const double sigma = std::sqrt((series.array() - mean).square().mean());
    if (sigma <= 0.0) throw DataError("zscore: series has zero variance");
    if (direction == ZDirection::high_is_anomalous)
        return ((series.array() - mean) / sigma).matrix();
    return ((mean - series.array()) / sigma).matrix();
}

Eigen::VectorXd fuse(const Eigen::VectorXd& z_re, const Eigen::VectorXd& z_c,
                     const FusionConfig& cfg) {
    if (z_re.size() != z_c.size()) throw DataError("fuse: length mismatch");
    switch (cfg.mode) {
        case FusionMode::critic_only:
            return z_c;
        case FusionMode::error_only:
            return z_re;
        case FusionMode::convex:
            if (cfg.alpha < 0.0 || cfg.alpha > 1.0)
                throw ConfigError("fuse: convex alpha must lie in [0,1]");
            return cfg.alpha * z_re + (1.0 - cfg.alpha) * z_c;
        case FusionMode::product:
            return cfg.product_scale * z_re.cwiseProduct(z_c);
    }
    throw ConfigError("fuse: unknown mode");
}

StepCollections collect_window_values(const std::vector<double>& window_values,
                                      const std::vector<int>& start_indices,
                                      int window_size, int series_length) {
    if (window_values.size() != start_indices.size())
        throw DataError("collect_window_values: size mismatch");
    StepCollections out(static_cast<std::size_t>(series_length));
    for (std::size_t i = 0; i < start_indices.size(); ++i)
        for (int q = 0; q < window_size; ++q) {
            const int j = start_indices[i] + q;
            if (j >= 0 && j < series_length)
                out[static_cast<std::size_t>(j)].push_back(window_values[i]);
        }
    return out;
}

}  // namespace tsgad
