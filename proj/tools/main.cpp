// tsgad command-line front end.
//
//   tsgad synth      --out signal.csv --labels labels.json [--length N ...]
//   tsgad train      --signal signal.csv --model model_dir
//   tsgad detect     --signal signal.csv --model model_dir --out out_dir
//   tsgad evaluate   --anomalies a.json --labels labels.json
//   tsgad benchmark  --manifest manifest.csv --out out_dir
//   tsgad ablate     --manifest manifest.csv --out out_dir
//
// Option precedence: command line > --config file > built-in defaults.
// Errors are reported as a one-line JSON object on stderr; exit codes are
// 1 (configuration), 2 (data), 3 (training).

#include "tsgad/pipeline.hpp"
#include "tsgad/synth.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace tsgad;

struct CommonOpts {
    std::optional<std::string> config;
    std::vector<std::string> overrides;  // key=value, applied after the file
};

// --config file first, then individual key=value overrides
PipelineConfig resolve_config(const CommonOpts& opts) {
    PipelineConfig cfg;
    if (opts.config) cfg = load_config_file(*opts.config, cfg);
    std::string text;
    for (const auto& kv : opts.overrides) text += kv + "\n";
    if (!text.empty()) cfg = parse_config_text(text, cfg);
    cfg.validate();
    return cfg;
}

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config, "config file (JSON object or key=value lines)");
    auto push = [&opts](const std::string& key) {
        return [&opts, key](const std::string& v) { opts.overrides.push_back(key + "=" + v); };
    };
    cmd->add_option_function<std::string>("--seed", push("seed"), "RNG seed")
        ->default_str("0");
    cmd->add_option_function<std::string>("--window-size", push("window_size"),
                                          "training window length t")
        ->default_str("100");
    cmd->add_option_function<std::string>("--latent-dim", push("latent_dim"),
                                          "latent dimension k")
        ->default_str("20");
    cmd->add_option_function<std::string>("--iterations", push("iterations"),
                                          "training iterations")
        ->default_str("2000");
    cmd->add_option_function<std::string>("--batch-size", push("batch_size"),
                                          "training batch size")
        ->default_str("64");
    cmd->add_option_function<std::string>("--target-length", push("target_length"),
                                          "aggregation target length (capped at T)")
        ->default_str("10000");
    cmd->add_option_function<std::string>("--detrend", push("detrend"),
                                          "remove per-channel linear trend")
        ->default_str("false");
    cmd->add_option_function<std::string>("--error", push("error"),
                                          "reconstruction error: point|area|dtw")
        ->default_str("point");
    cmd->add_option_function<std::string>("--fusion", push("fusion"),
                                          "score fusion: critic|error|convex|product")
        ->default_str("convex");
    cmd->add_option_function<std::string>("--alpha", push("alpha"),
                                          "convex fusion weight on the error score")
        ->default_str("0.5");
    cmd->add_option_function<std::string>("--theta", push("theta"),
                                          "pruning drop threshold")
        ->default_str("0.1");
    cmd->add_option_function<std::string>("--sigmas", push("sigmas"),
                                          "threshold sigma multiplier")
        ->default_str("4");
    cmd->add_option_function<std::string>("--merge-gap", push("merge_gap"),
                                          "merge sequences separated by <= gap points")
        ->default_str("0");
    cmd->add_option_function<std::string>("--half-window", push("half_window"),
                                          "half window l for area/dtw errors")
        ->default_str("10");
    cmd->add_option_function<std::string>("--smooth", push("smooth"),
                                          "critic collection smoothing: mode|max")
        ->default_str("mode");
}

int run(int argc, char** argv) {
    CLI::App app{"GAN-based time-series anomaly detection"};
    app.require_subcommand(1);
    app.get_formatter()->column_width(34);

    // synth
    auto* synth = app.add_subcommand("synth", "generate a labeled synthetic signal");
    std::string synth_out, synth_labels;
    SynthConfig synth_cfg;
    std::uint64_t synth_seed = 0;
    synth->add_option("--out", synth_out, "output signal CSV")->required();
    synth->add_option("--labels", synth_labels, "output labels JSON")->required();
    synth->add_option("--length", synth_cfg.length, "series length")->capture_default_str();
    synth->add_option("--period", synth_cfg.period, "base sine period")->capture_default_str();
    synth->add_option("--amplitude", synth_cfg.amplitude, "base amplitude")->capture_default_str();
    synth->add_option("--noise", synth_cfg.noise, "noise std")->capture_default_str();
    synth->add_option("--point-anomalies", synth_cfg.point_anomalies, "spike count")
        ->capture_default_str();
    synth->add_option("--collective-anomalies", synth_cfg.collective_anomalies,
                      "collective anomaly count")
        ->capture_default_str();
    synth->add_option("--seed", synth_seed, "RNG seed")->capture_default_str();

    // train
    auto* train = app.add_subcommand("train", "train a model on a signal");
    CommonOpts train_opts;
    std::string train_signal, train_model;
    train->add_option("--signal", train_signal, "input signal CSV")->required();
    train->add_option("--model", train_model, "output model directory")->required();
    add_common(train, train_opts);

    // detect
    auto* detect = app.add_subcommand("detect", "score a signal with a trained model");
    CommonOpts detect_opts;
    std::string detect_signal, detect_model, detect_out;
    detect->add_option("--signal", detect_signal, "input signal CSV")->required();
    detect->add_option("--model", detect_model, "trained model directory")->required();
    detect->add_option("--out", detect_out, "output directory")->required();
    add_common(detect, detect_opts);

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "score detections against labels");
    std::string eval_anoms, eval_labels;
    evaluate->add_option("--anomalies", eval_anoms, "detected anomalies JSON")->required();
    evaluate->add_option("--labels", eval_labels, "ground truth labels JSON")->required();

    // benchmark
    auto* benchmark = app.add_subcommand("benchmark", "train+detect over a signal manifest");
    CommonOpts bench_opts;
    std::string bench_manifest, bench_out;
    int bench_jobs = 1;
    benchmark->add_option("--manifest", bench_manifest, "manifest CSV: dataset,signal,labels")
        ->required();
    benchmark->add_option("--out", bench_out, "output directory")->required();
    benchmark->add_option("--jobs", bench_jobs, "parallel signals")->capture_default_str();
    add_common(benchmark, bench_opts);

    // ablate
    auto* ablate = app.add_subcommand("ablate", "run every scoring variant over a manifest");
    CommonOpts abl_opts;
    std::string abl_manifest, abl_out;
    int abl_jobs = 1;
    ablate->add_option("--manifest", abl_manifest, "manifest CSV: dataset,signal,labels")
        ->required();
    ablate->add_option("--out", abl_out, "output directory")->required();
    ablate->add_option("--jobs", abl_jobs, "parallel signals")->capture_default_str();
    add_common(ablate, abl_opts);

    CLI11_PARSE(app, argc, argv);

    if (synth->parsed()) {
        auto [ts, truth] = generate_synthetic(synth_cfg, synth_seed);
        save_signal(ts, synth_out);
        save_labels(truth, synth_labels);
        std::cout << "wrote " << ts.length() << " points, " << truth.windows.size()
                  << " anomaly windows\n";
    } else if (train->parsed()) {
        auto cfg = resolve_config(train_opts);
        auto signal = load_signal(train_signal);
        auto bundle = train_pipeline(signal, cfg);
        save_bundle(bundle, train_model);
        std::cout << "trained " << cfg.train.iterations << " iterations, model saved to "
                  << train_model << "\n";
    } else if (detect->parsed()) {
        auto cfg = resolve_config(detect_opts);
        auto signal = load_signal(detect_signal);
        auto bundle = load_bundle(detect_model);
        auto out = detect_pipeline(signal, bundle, cfg);
        std::filesystem::create_directories(detect_out);
        write_scores_csv(out, detect_out + "/scores.csv");
        write_anomalies_json(out, detect_out + "/anomalies.json");
        std::cout << out.anomalies.size() << " anomalous sequences -> " << detect_out
                  << "\n";
    } else if (evaluate->parsed()) {
        auto truth = load_labels(eval_labels);
        auto pred = load_anomalies_json(eval_anoms);
        auto counts = confusion(truth, pred);
        auto m = prf1(counts);
        nlohmann::json j{{"tp", counts.tp},
                         {"fp", counts.fp},
                         {"fn", counts.fn},
                         {"precision", m.precision},
                         {"recall", m.recall},
                         {"f1", m.f1}};
        std::cout << j.dump() << "\n";
    } else if (benchmark->parsed()) {
        auto cfg = resolve_config(bench_opts);
        auto manifest = load_manifest(bench_manifest);
        auto report = run_benchmark(manifest, cfg, bench_out, bench_jobs);
        std::cout << "mean F1 " << report.mean_f1() << " over " << report.datasets.size()
                  << " datasets -> " << bench_out << "/report.csv\n";
    } else if (ablate->parsed()) {
        auto cfg = resolve_config(abl_opts);
        auto manifest = load_manifest(abl_manifest);
        auto reports = run_ablation(manifest, cfg, abl_out, abl_jobs);
        for (const auto& r : reports)
            std::cout << r.variant << " mean F1 " << r.mean_f1() << "\n";
        std::cout << "-> " << abl_out << "/ablation_report.csv\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const tsgad::Error& e) {
        nlohmann::json j{{"error", e.what()}, {"code", e.exit_code}};
        std::cerr << j.dump() << "\n";
        return e.exit_code;
    } catch (const std::exception& e) {
        nlohmann::json j{{"error", e.what()}, {"code", 2}};
        std::cerr << j.dump() << "\n";
        return 2;
    }
}
