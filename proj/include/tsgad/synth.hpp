#pragma once

// Synthetic signal generator: sine waves with injected point spikes and
// collective (level / amplitude / frequency shift) anomalies, plus matching
// ground-truth labels.  Keeps tests and the acceptance suite free of
// external data.

#include "tsgad/timeseries.hpp"

#include <cstdint>
#include <utility>

namespace tsgad {

struct SynthConfig {
    int length = 2000;
    double period = 50.0;
    double amplitude = 1.0;
    double noise = 0.01;
    int point_anomalies = 2;
    int collective_anomalies = 3;
};

std::pair<TimeSeries, GroundTruthWindows> generate_synthetic(const SynthConfig& cfg,
                                                             std::uint64_t seed);

}  // namespace tsgad
