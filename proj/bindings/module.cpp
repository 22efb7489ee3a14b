// Python bindings for the core pipeline: synthesis, preprocessing, training,
// detection, scoring primitives and evaluation.

#include "tsgad/pipeline.hpp"
#include "tsgad/synth.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace tsgad;

namespace {

PipelineConfig config_from_kwargs(const py::kwargs& kwargs) {
    // reuse the key=value parser so Python sees the exact CLI/config surface
    std::string text;
    for (auto item : kwargs)
        text += py::str(item.first).cast<std::string>() + " = " +
                py::str(item.second).cast<std::string>() + "\n";
    return parse_config_text(text);
}

}  // namespace

PYBIND11_MODULE(_tsgad, m) {
    m.doc() = "GAN-based time-series anomaly detection";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
    py::register_exception<TrainingError>(m, "TrainingError", PyExc_RuntimeError);

    py::class_<TimeSeries>(m, "TimeSeries")
        .def(py::init<>())
        .def_readwrite("timestamps", &TimeSeries::timestamps)
        .def_readwrite("values", &TimeSeries::values)
        .def_readwrite("channel_names", &TimeSeries::channel_names)
        .def_property_readonly("length", &TimeSeries::length)
        .def_property_readonly("channels", &TimeSeries::channels);

    py::class_<GroundTruthWindows>(m, "GroundTruthWindows")
        .def(py::init<>())
        .def_readwrite("windows", &GroundTruthWindows::windows);

    py::class_<AnomalousSequence>(m, "AnomalousSequence")
        .def_readonly("start", &AnomalousSequence::start)
        .def_readonly("end", &AnomalousSequence::end)
        .def_readonly("max_score", &AnomalousSequence::max_score)
        .def("__repr__", [](const AnomalousSequence& s) {
            return "AnomalousSequence(" + std::to_string(s.start) + ", " +
                   std::to_string(s.end) + ", " + std::to_string(s.max_score) + ")";
        });

    py::class_<ConfusionCounts>(m, "ConfusionCounts")
        .def_readonly("tp", &ConfusionCounts::tp)
        .def_readonly("fp", &ConfusionCounts::fp)
        .def_readonly("fn", &ConfusionCounts::fn);

    py::class_<Metrics>(m, "Metrics")
        .def_readonly("precision", &Metrics::precision)
        .def_readonly("recall", &Metrics::recall)
        .def_readonly("f1", &Metrics::f1);

    py::class_<ModelBundle>(m, "ModelBundle")
        .def_property_readonly("window_size",
                               [](const ModelBundle& b) { return b.window_cfg.window_size; })
        .def_property_readonly("latent_dim",
                               [](const ModelBundle& b) { return b.model.latent_dim; })
        .def_property_readonly("seed", [](const ModelBundle& b) { return b.seed; })
        .def_property_readonly("training_log", [](const ModelBundle& b) {
            py::list rows;
            for (const auto& r : b.training_log)
                rows.append(py::dict(py::arg("iteration") = r.iteration, py::arg("vx") = r.vx,
                                     py::arg("vz") = r.vz, py::arg("cycle") = r.cycle,
                                     py::arg("gp_x") = r.gp_x, py::arg("gp_z") = r.gp_z));
            return rows;
        });

    py::class_<DetectionOutput>(m, "DetectionOutput")
        .def_readonly("timestamps", &DetectionOutput::timestamps)
        .def_readonly("x", &DetectionOutput::x)
        .def_readonly("x_hat", &DetectionOutput::x_hat)
        .def_readonly("error", &DetectionOutput::err)
        .def_readonly("critic_raw", &DetectionOutput::critic_raw)
        .def_readonly("critic_smoothed", &DetectionOutput::critic_smoothed)
        .def_readonly("z_error", &DetectionOutput::z_re)
        .def_readonly("z_critic", &DetectionOutput::z_c)
        .def_readonly("fused", &DetectionOutput::fused)
        .def_readonly("anomalies", &DetectionOutput::anomalies);

    // io
    m.def("load_signal", &load_signal, py::arg("path"));
    m.def("save_signal", &save_signal, py::arg("series"), py::arg("path"));
    m.def("parse_signal_csv", &parse_signal_csv, py::arg("text"),
          py::arg("origin") = "<memory>");
    m.def("load_labels", &load_labels, py::arg("path"));
    m.def("save_labels", &save_labels, py::arg("labels"), py::arg("path"));

    // preprocessing primitives
    m.def("aggregate", &aggregate, py::arg("series"), py::arg("target_length"));
    m.def("detrend", &detrend, py::arg("series"));
    m.def(
        "normalize",
        [](const TimeSeries& ts) {
            auto [out, params] = normalize(ts);
            return py::make_tuple(out, params.min, params.max);
        },
        py::arg("series"), "Returns (normalized, per_channel_min, per_channel_max).");

    // synthetic data
    m.def(
        "generate_synthetic",
        [](int length, double period, double amplitude, double noise, int point_anomalies,
           int collective_anomalies, std::uint64_t seed) {
            SynthConfig cfg{length, period, amplitude, noise, point_anomalies,
                            collective_anomalies};
            auto [ts, truth] = generate_synthetic(cfg, seed);
            return py::make_tuple(ts, truth);
        },
        py::arg("length") = 2000, py::arg("period") = 50.0, py::arg("amplitude") = 1.0,
        py::arg("noise") = 0.03, py::arg("point_anomalies") = 2,
        py::arg("collective_anomalies") = 3, py::arg("seed") = 0);

    // pipeline; configuration keys are passed as keyword arguments, e.g.
    //   train(ts, iterations=100, window_size=50, seed=3)
    m.def("train", [](const TimeSeries& raw, const py::kwargs& kwargs) {
        return train_pipeline(raw, config_from_kwargs(kwargs));
    });
    m.def("detect", [](const TimeSeries& raw, const ModelBundle& bundle,
                       const py::kwargs& kwargs) {
        return detect_pipeline(raw, bundle, config_from_kwargs(kwargs));
    });
    m.def("save_model", &save_bundle, py::arg("bundle"), py::arg("path"));
    m.def("load_model", &load_bundle, py::arg("path"));

    // scoring primitives
    m.def("error_pointwise", &error_pointwise, py::arg("x"), py::arg("x_hat"));
    m.def("error_area", &error_area, py::arg("x"), py::arg("x_hat"), py::arg("l") = 10);
    m.def("error_dtw", &error_dtw, py::arg("x"), py::arg("x_hat"), py::arg("l") = 10);
    m.def("dtw_distance", &dtw_distance, py::arg("a"), py::arg("b"));

    // evaluation
    m.def(
        "evaluate",
        [](const GroundTruthWindows& truth, const std::vector<std::pair<double, double>>& pred) {
            std::vector<PredictedWindow> p;
            p.reserve(pred.size());
            for (auto [s, e] : pred) p.push_back({s, e});
            auto counts = confusion(truth, p);
            return py::make_tuple(counts, prf1(counts));
        },
        py::arg("truth"), py::arg("predicted"),
        "Window-overlap confusion counts and precision/recall/F1.");

    m.def("ablation_variants", [] { return ablation_variants(); });
}
