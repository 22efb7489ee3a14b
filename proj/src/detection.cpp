#include "tsgad/detection.hpp"

#include "tsgad/errors.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>

namespace tsgad {

std::vector<bool> adaptive_threshold(const Eigen::VectorXd& scores,
                                     const ThresholdConfig& cfg) {
    const auto T = static_cast<int>(scores.size());
    if (T < 1) throw DataError("adaptive_threshold: empty score series");
    if (cfg.window_fraction <= 0.0 || cfg.window_fraction > 1.0 ||
        cfg.step_fraction <= 0.0 || cfg.step_fraction > cfg.window_fraction ||
        cfg.sigmas <= 0.0)
        throw ConfigError("adaptive_threshold: invalid threshold configuration");

    const int w = std::max(1, static_cast<int>(std::lround(T * cfg.window_fraction)));
    const int step = std::max(1, static_cast<int>(std::lround(T * cfg.step_fraction)));

    std::vector<bool> mask(static_cast<std::size_t>(T), false);
    for (int start = 0; start < T; start += step) {
        const int len = std::min(w, T - start);  // partial window at the tail
        const auto seg = scores.segment(start, len);
        const double mean = seg.mean();
        const double sigma = std::sqrt((seg.array() - mean).square().mean());
        const double threshold = mean + cfg.sigmas * sigma;
        for (int i = start; i < start + len; ++i)
            if (scores(i) > threshold) mask[static_cast<std::size_t>(i)] = true;
    }
    return mask;
}

std::vector<AnomalousSequence> extract_sequences(const std::vector<bool>& mask,
                                                 const Eigen::VectorXd& scores) {
    if (static_cast<Eigen::Index>(mask.size()) != scores.size())
        throw DataError("extract_sequences: mask/scores length mismatch");
    std::vector<AnomalousSequence> seqs;
    int start = -1;
    for (int i = 0; i <= static_cast<int>(mask.size()); ++i) {
        const bool on = i < static_cast<int>(mask.size()) && mask[static_cast<std::size_t>(i)];
        if (on && start < 0) start = i;
        if (!on && start >= 0) {
            AnomalousSequence s{start, i - 1, scores.segment(start, i - start).maxCoeff()};
            seqs.push_back(s);
            start = -1;
        }
    }
    return seqs;
}

std::vector<AnomalousSequence> prune(const std::vector<AnomalousSequence>& seqs,
                                     const PruneConfig& cfg) {
    if (cfg.theta <= 0.0 || cfg.theta >= 1.0)
        throw ConfigError("prune: theta must lie in (0,1)");
    if (seqs.size() <= 1) return seqs;
    for (const auto& s : seqs)
        if (s.max_score <= 0.0) {
            std::cerr << "warning: non-positive peak score, pruning skipped\n";
            return seqs;
        }

    std::vector<std::size_t> order(seqs.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return seqs[a].max_score > seqs[b].max_score;
    });

    // first rank whose relative drop does not exceed theta; it and all lower
    // ranks are reclassified normal
    std::size_t cutoff = order.size();
    for (std::size_t r = 1; r < order.size(); ++r) {
        const double prev = seqs[order[r - 1]].max_score;
        const double cur = seqs[order[r]].max_score;
        if ((prev - cur) / prev <= cfg.theta) {
            cutoff = r;
            break;
        }
    }

    std::vector<bool> keep(seqs.size(), false);
    for (std::size_t r = 0; r < cutoff; ++r) keep[order[r]] = true;
    std::vector<AnomalousSequence> out;
    for (std::size_t i = 0; i < seqs.size(); ++i)
        if (keep[i]) out.push_back(seqs[i]);  // original (start-index) order
    return out;
}

std::vector<AnomalousSequence> merge_gaps(const std::vector<AnomalousSequence>& seqs,
                                          int gap, const Eigen::VectorXd& scores) {
    if (gap <= 0 || seqs.empty()) return seqs;
    std::vector<AnomalousSequence> out{seqs.front()};
    for (std::size_t i = 1; i < seqs.size(); ++i) {
        auto& last = out.back();
        if (seqs[i].start - last.end - 1 <= gap) {
            last.end = seqs[i].end;
            last.max_score = scores.segment(last.start, last.end - last.start + 1).maxCoeff();
        } else {
            out.push_back(seqs[i]);
        }
    }
    return out;
}

}  // namespace tsgad
