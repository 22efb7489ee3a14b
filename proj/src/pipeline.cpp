#include "tsgad/pipeline.hpp"

#include "tsgad/errors.hpp"
#include "tsgad/scoring.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

namespace tsgad {

namespace fs = std::filesystem;

namespace {
std::atomic<long> g_train_calls{0};
}

long train_call_count() { return g_train_calls.load(); }

Prepared preprocess(const TimeSeries& raw, const PipelineConfig& cfg) {
    auto [normed, norm] = normalize(raw);
    const int target = static_cast<int>(
        std::min<Eigen::Index>(cfg.target_length, raw.length()));
    TimeSeries series =
        target < raw.length() ? aggregate(normed, target) : std::move(normed);
    if (cfg.detrend) series = detrend(series);
    return {std::move(series), std::move(norm)};
}

TimeSeries preprocess_like(const TimeSeries& raw, const ModelBundle& bundle) {
    TimeSeries series = apply_normalization(raw, bundle.norm);
    const int target = static_cast<int>(
        std::min<Eigen::Index>(bundle.target_length, raw.length()));
    if (target < raw.length()) series = aggregate(series, target);
    if (bundle.detrended) series = detrend(series);
    return series;
}

ModelBundle train_pipeline(const TimeSeries& raw, const PipelineConfig& cfg) {
    cfg.validate();
    auto prepared = preprocess(raw, cfg);
    ++g_train_calls;
    return train_bundle(prepared.series, prepared.norm, cfg);
}

DetectionOutput detect_pipeline(const TimeSeries& raw, const ModelBundle& bundle,
                                const PipelineConfig& cfg) {
    TimeSeries series = preprocess_like(raw, bundle);
    const auto T = static_cast<int>(series.length());
    const int t = bundle.window_cfg.window_size;
    const auto M = series.channels();
    if (t > T) throw DataError("detect: series shorter than the model window");

    // step size 1 at inference so every step has full window coverage
    WindowSet windows = make_windows(series, {t, 1});
    auto inference = reconstruct_windows(bundle, windows);

    // per-channel reconstruction collections -> median series -> error series
    Eigen::MatrixXd x_hat(T, M);
    Eigen::VectorXd err = Eigen::VectorXd::Zero(T);
    for (Eigen::Index ch = 0; ch < M; ++ch) {
        StepCollections coll(static_cast<std::size_t>(T));
        for (std::size_t i = 0; i < windows.count(); ++i) {
            const int start = windows.start_indices[i];
            for (int q = 0; q < t; ++q)
                coll[static_cast<std::size_t>(start + q)].push_back(
                    inference.reconstructions[i](q, ch));
        }
        x_hat.col(ch) = aggregate_reconstructions(coll);
        Eigen::VectorXd channel_err;
        switch (cfg.error.method) {
            case ErrorMethod::point:
                channel_err = error_pointwise(series.values.col(ch), x_hat.col(ch));
                break;
            case ErrorMethod::area:
                channel_err = error_area(series.values.col(ch), x_hat.col(ch),
                                         cfg.error.half_window);
                break;
            case ErrorMethod::dtw:
                channel_err = error_dtw(series.values.col(ch), x_hat.col(ch),
                                        cfg.error.half_window);
                break;
        }
        err += channel_err;
    }
    err /= double(M);

    auto critic_coll = collect_window_values(inference.critic_scores,
                                             windows.start_indices, t, T);
    Eigen::VectorXd critic_raw = aggregate_reconstructions(critic_coll);
    Eigen::VectorXd critic_smoothed = smooth_critic(critic_coll, cfg.smooth);

    DetectionOutput out;
    out.timestamps = series.timestamps;
    out.x = series.values.col(0);
    out.x_hat = x_hat.col(0);
    out.err = err;
    out.critic_raw = critic_raw;
    out.critic_smoothed = critic_smoothed;
    out.z_re = zscore(err, ZDirection::high_is_anomalous);
    out.z_c = zscore(critic_smoothed, ZDirection::low_is_anomalous);
    // A critic deviating from its typical output in either direction marks a
    // suspect region, so fusion consumes the magnitude; the +1 keeps the
    // multiplicative mode amplifying rather than damping the error signal.
    Eigen::VectorXd z_c_mag = out.z_c.array().abs() + 1.0;
    out.fused = fuse(out.z_re, z_c_mag, cfg.fusion);

    auto mask = adaptive_threshold(out.fused, cfg.threshold);
    auto seqs = extract_sequences(mask, out.fused);
    if (cfg.merge_gap > 0) seqs = merge_gaps(seqs, cfg.merge_gap, out.fused);
    // The first and last t-1 steps have fewer than t covering windows, so the
    // smoothed critic there degenerates toward raw single-window outputs and
    // throws spurious score excursions.  Sequences confined to those margins
    // are coverage artifacts, not data; drop them before the rank-based
    // pruning so they cannot distort the peak spectrum.
    const int edge = t - 1;
    std::erase_if(seqs, [&](const AnomalousSequence& s) {
        return s.end < edge || s.start > T - 1 - edge;
    });
    out.anomalies = prune(seqs, cfg.prune_cfg);
    return out;
}

void write_scores_csv(const DetectionOutput& out, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw DataError("cannot write scores: " + path);
    f << "timestamp,x,x_hat,error,critic_raw,critic_smoothed,z_error,z_critic,fused\n";
    f.precision(9);
    for (Eigen::Index i = 0; i < out.x.size(); ++i)
        f << out.timestamps[static_cast<std::size_t>(i)] << ',' << out.x(i) << ','
          << out.x_hat(i) << ',' << out.err(i) << ','
          << out.critic_raw(i) << ',' << out.critic_smoothed(i) << ',' << out.z_re(i)
          << ',' << out.z_c(i) << ',' << out.fused(i) << '\n';
}

void write_anomalies_json(const DetectionOutput& out, const std::string& path) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& a : out.anomalies) {
        j.push_back({{"start", a.start},
                     {"end", a.end},
                     {"score", a.max_score},
                     {"start_ts", out.timestamps[static_cast<std::size_t>(a.start)]},
                     {"end_ts", out.timestamps[static_cast<std::size_t>(a.end)]}});
    }
    std::ofstream f(path);
    if (!f) throw DataError("cannot write anomalies: " + path);
    f << j.dump(2) << '\n';
}

std::vector<PredictedWindow> load_anomalies_json(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw DataError("cannot open anomalies file: " + path);
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("anomalies " + path + ": " + e.what());
    }
    if (!j.is_array()) throw DataError("anomalies " + path + ": expected a JSON array");
    std::vector<PredictedWindow> out;
    for (const auto& a : j) {
        PredictedWindow w;
        if (a.contains("start_ts")) {
            w.start = a.at("start_ts").get<double>();
            w.end = a.at("end_ts").get<double>();
        } else {
            w.start = a.at("start").get<double>();
            w.end = a.at("end").get<double>();
        }
        out.push_back(w);
    }
    return out;
}

std::vector<PredictedWindow> to_predicted_windows(const DetectionOutput& out) {
    std::vector<PredictedWindow> pred;
    for (const auto& a : out.anomalies)
        pred.push_back({out.timestamps[static_cast<std::size_t>(a.start)],
                        out.timestamps[static_cast<std::size_t>(a.end)]});
    return pred;
}

std::vector<ManifestEntry> load_manifest(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw DataError("cannot open manifest: " + path);
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("manifest " + path + ": " + e.what());
    }
    if (!j.is_array()) throw DataError("manifest " + path + ": expected a JSON array");
    std::vector<ManifestEntry> out;
    for (const auto& e : j)
        out.push_back({e.at("dataset").get<std::string>(),
                       e.at("signal_csv").get<std::string>(),
                       e.at("labels_json").get<std::string>()});
    return out;
}

const std::vector<std::string>& ablation_variants() {
    static const std::vector<std::string> v = {
        "critic",       "point",        "area",        "dtw",
        "convex_point", "convex_area",  "convex_dtw",
        "product_point", "product_area", "product_dtw"};
    return v;
}

PipelineConfig variant_config(const PipelineConfig& base, const std::string& variant) {
    PipelineConfig cfg = base;
    auto set_error = [&](const std::string& m) { cfg.error.method = parse_error_method(m); };
    if (variant == "critic") {
        cfg.fusion.mode = FusionMode::critic_only;
    } else if (variant == "point" || variant == "area" || variant == "dtw") {
        cfg.fusion.mode = FusionMode::error_only;
        set_error(variant);
    } else if (variant.rfind("convex_", 0) == 0) {
        cfg.fusion.mode = FusionMode::convex;
        set_error(variant.substr(7));
    } else if (variant.rfind("product_", 0) == 0) {
        cfg.fusion.mode = FusionMode::product;
        set_error(variant.substr(8));
    } else {
        throw ConfigError("unknown ablation variant '" + variant + "'");
    }
    return cfg;
}

namespace {

std::string signal_name(const std::string& csv_path) {
    return fs::path(csv_path).stem().string();
}

// Trains or loads the cached model for one manifest entry.
ModelBundle model_for_signal(const ManifestEntry& entry, const PipelineConfig& cfg,
                             const fs::path& signal_dir, const TimeSeries& raw) {
    const fs::path model_dir = signal_dir / "model";
    if (fs::exists(model_dir / "spec.json")) return load_bundle(model_dir.string());
    auto bundle = train_pipeline(raw, cfg);
    save_bundle(bundle, model_dir.string());
    return bundle;
}

SignalResult evaluate_detection(const ManifestEntry& entry, const std::string& variant,
                                const DetectionOutput& det) {
    SignalResult r;
    r.dataset = entry.dataset;
    r.signal = signal_name(entry.signal_csv);
    r.variant = variant;
    auto truth = load_labels(entry.labels_json);
    r.counts = confusion(truth, to_predicted_windows(det));
    r.metrics = prf1(r.counts);
    return r;
}

void write_metrics_json(const SignalResult& r, const fs::path& path) {
    nlohmann::json j = {{"tp", r.counts.tp},
                        {"fp", r.counts.fp},
                        {"fn", r.counts.fn},
                        {"precision", r.metrics.precision},
                        {"recall", r.metrics.recall},
                        {"f1", r.metrics.f1}};
    std::ofstream f(path);
    f << j.dump(2) << '\n';
}

SignalResult read_metrics_json(const ManifestEntry& entry, const std::string& variant,
                               const fs::path& path) {
    SignalResult r;
    r.dataset = entry.dataset;
    r.signal = signal_name(entry.signal_csv);
    r.variant = variant;
    std::ifstream f(path);
    nlohmann::json j;
    f >> j;
    r.counts = {j.at("tp").get<int>(), j.at("fp").get<int>(), j.at("fn").get<int>()};
    r.metrics = prf1(r.counts);
    return r;
}

// Runs fn(i) for every manifest index over `jobs` worker threads.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn) {
    if (jobs <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    const auto n_workers = std::min<std::size_t>(static_cast<std::size_t>(jobs), count);
    for (std::size_t w = 0; w < n_workers; ++w)
        workers.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
        });
    for (auto& th : workers) th.join();
}

}  // namespace

EvalReport run_benchmark(const std::vector<ManifestEntry>& manifest,
                         const PipelineConfig& cfg, const std::string& out_dir, int jobs) {
    cfg.validate();
    std::vector<SignalResult> results(manifest.size());
    parallel_for(manifest.size(), jobs, [&](std::size_t i) {
        const auto& entry = manifest[i];
        const fs::path signal_dir = fs::path(out_dir) / entry.dataset /
                                    signal_name(entry.signal_csv);
        const fs::path metrics_path = signal_dir / "metrics.json";
        try {
            if (fs::exists(metrics_path)) {  // cached result, skip the signal
                results[i] = read_metrics_json(entry, "current", metrics_path);
                return;
            }
            fs::create_directories(signal_dir);
            auto raw = load_signal(entry.signal_csv);
            auto bundle = model_for_signal(entry, cfg, signal_dir, raw);
            auto det = detect_pipeline(raw, bundle, cfg);
            write_anomalies_json(det, (signal_dir / "anomalies.json").string());
            write_scores_csv(det, (signal_dir / "scores.csv").string());
            results[i] = evaluate_detection(entry, "current", det);
            write_metrics_json(results[i], metrics_path);
        } catch (const std::exception& e) {
            results[i].dataset = entry.dataset;
            results[i].signal = signal_name(entry.signal_csv);
            results[i].failed = true;
            results[i].error = e.what();
            std::cerr << "benchmark: signal " << entry.signal_csv << " failed: "
                      << e.what() << '\n';
        }
    });
    auto report = summarize(to_string(cfg.fusion.mode) + "_" + to_string(cfg.error.method),
                            std::move(results));
    write_report_csv({report}, (fs::path(out_dir) / "report.csv").string());
    return report;
}

std::vector<EvalReport> run_ablation(const std::vector<ManifestEntry>& manifest,
                                     const PipelineConfig& cfg, const std::string& out_dir,
                                     int jobs) {
    cfg.validate();
    const auto& variants = ablation_variants();
    // results[variant][signal]
    std::vector<std::vector<SignalResult>> results(
        variants.size(), std::vector<SignalResult>(manifest.size()));

    parallel_for(manifest.size(), jobs, [&](std::size_t i) {
        const auto& entry = manifest[i];
        const fs::path signal_dir = fs::path(out_dir) / entry.dataset /
                                    signal_name(entry.signal_csv);
        try {
            fs::create_directories(signal_dir);
            auto raw = load_signal(entry.signal_csv);
            // one trained model serves every scoring variant
            auto bundle = model_for_signal(entry, cfg, signal_dir, raw);
            for (std::size_t v = 0; v < variants.size(); ++v) {
                auto det = detect_pipeline(raw, bundle, variant_config(cfg, variants[v]));
                write_anomalies_json(
                    det, (signal_dir / ("anomalies_" + variants[v] + ".json")).string());
                results[v][i] = evaluate_detection(entry, variants[v], det);
            }
        } catch (const std::exception& e) {
            for (std::size_t v = 0; v < variants.size(); ++v) {
                results[v][i].dataset = entry.dataset;
                results[v][i].signal = signal_name(entry.signal_csv);
                results[v][i].variant = variants[v];
                results[v][i].failed = true;
                results[v][i].error = e.what();
            }
            std::cerr << "ablation: signal " << entry.signal_csv << " failed: "
                      << e.what() << '\n';
        }
    });

    std::vector<EvalReport> reports;
    for (std::size_t v = 0; v < variants.size(); ++v)
        reports.push_back(summarize(variants[v], std::move(results[v])));
    write_report_csv(reports, (fs::path(out_dir) / "ablation_report.csv").string());
    return reports;
}

}  // namespace tsgad
