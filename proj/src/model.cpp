#include "tsgad/model.hpp"

#include "tsgad/errors.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

namespace tsgad {

namespace fs = std::filesystem;

ModelBundle train_bundle(const TimeSeries& prepared, const NormParams& norm,
                         const PipelineConfig& cfg) {
    WindowConfig wc{cfg.window_size, cfg.step_size};
    auto windows = make_windows(prepared, wc);
    auto result = nn::train<real_t>(windows, static_cast<int>(prepared.channels()),
                                    cfg.latent_dim, cfg.network, cfg.train, cfg.seed);
    ModelBundle bundle;
    bundle.model = std::move(result.model);
    bundle.training_log = std::move(result.log);
    bundle.norm = norm;
    bundle.window_cfg = wc;
    bundle.target_length = cfg.target_length;
    bundle.detrended = cfg.detrend;
    bundle.spec = cfg.network;
    bundle.train_cfg = cfg.train;
    bundle.seed = cfg.seed;
    return bundle;
}

namespace {

constexpr std::uint32_t kTensorMagic = 0x54534754;  // "TSGT"

void write_tensors(const std::vector<nn::Var<real_t>>& params, const fs::path& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot write tensor file: " + path.string());
    auto put32 = [&](std::uint32_t v) { f.write(reinterpret_cast<const char*>(&v), 4); };
    put32(kTensorMagic);
    put32(static_cast<std::uint32_t>(params.size()));
    for (const auto& p : params) {
        const auto rows = static_cast<std::uint64_t>(p->value.rows());
        const auto cols = static_cast<std::uint64_t>(p->value.cols());
        f.write(reinterpret_cast<const char*>(&rows), 8);
        f.write(reinterpret_cast<const char*>(&cols), 8);
        f.write(reinterpret_cast<const char*>(p->value.data()),
                static_cast<std::streamsize>(sizeof(real_t) * p->value.size()));
    }
}

void read_tensors(const std::vector<nn::Var<real_t>>& params, const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot open tensor file: " + path.string());
    std::uint32_t magic = 0, count = 0;
    f.read(reinterpret_cast<char*>(&magic), 4);
    f.read(reinterpret_cast<char*>(&count), 4);
    if (magic != kTensorMagic)
        throw DataError("bad tensor file magic: " + path.string());
    if (count != params.size())
        throw DataError("tensor count mismatch in " + path.string());
    for (const auto& p : params) {
        std::uint64_t rows = 0, cols = 0;
        f.read(reinterpret_cast<char*>(&rows), 8);
        f.read(reinterpret_cast<char*>(&cols), 8);
        if (rows != static_cast<std::uint64_t>(p->value.rows()) ||
            cols != static_cast<std::uint64_t>(p->value.cols()))
            throw DataError("tensor shape mismatch in " + path.string());
        f.read(reinterpret_cast<char*>(p->value.data()),
               static_cast<std::streamsize>(sizeof(real_t) * p->value.size()));
        if (!f) throw DataError("truncated tensor file: " + path.string());
    }
}

}  // namespace

void save_bundle(const ModelBundle& bundle, const std::string& dir) {
    fs::create_directories(dir);
    const fs::path base(dir);

    nlohmann::json j;
    j["format"] = 1;
    j["window_size"] = bundle.window_cfg.window_size;
    j["step_size"] = bundle.window_cfg.step_size;
    j["channels"] = bundle.model.channels;
    j["latent_dim"] = bundle.model.latent_dim;
    j["target_length"] = bundle.target_length;
    j["detrend"] = bundle.detrended;
    j["seed"] = bundle.seed;
    j["network"] = {{"encoder_hidden", bundle.spec.encoder_hidden},
                    {"decoder_hidden", bundle.spec.decoder_hidden},
                    {"critic_filters", bundle.spec.critic_filters},
                    {"critic_kernel", bundle.spec.critic_kernel},
                    {"dropout_rate", bundle.spec.dropout_rate},
                    {"leaky_slope", bundle.spec.leaky_slope}};
    j["train"] = {{"batch_size", bundle.train_cfg.batch_size},
                  {"iterations", bundle.train_cfg.iterations},
                  {"n_critic", bundle.train_cfg.n_critic},
                  {"learning_rate", bundle.train_cfg.learning_rate},
                  {"gp_weight", bundle.train_cfg.gp_weight},
                  {"beta1", bundle.train_cfg.beta1},
                  {"beta2", bundle.train_cfg.beta2}};
    j["norm_min"] = std::vector<double>(bundle.norm.min.data(),
                                        bundle.norm.min.data() + bundle.norm.min.size());
    j["norm_max"] = std::vector<double>(bundle.norm.max.data(),
                                        bundle.norm.max.data() + bundle.norm.max.size());
    {
        std::ofstream f(base / "spec.json");
        if (!f) throw DataError("cannot write " + (base / "spec.json").string());
        f << j.dump(2) << '\n';
    }

    write_tensors(bundle.model.enc.params(), base / "encoder.bin");
    write_tensors(bundle.model.dec.params(), base / "decoder.bin");
    write_tensors(bundle.model.critic_x.params(), base / "critic_x.bin");
    write_tensors(bundle.model.critic_z.params(), base / "critic_z.bin");

    std::ofstream log(base / "training_log.csv");
    if (!log) throw DataError("cannot write training log");
    log << "iteration,Vx,Vz,cycle,gp_x,gp_z\n";
    log.precision(9);
    for (const auto& r : bundle.training_log)
        log << r.iteration << ',' << r.vx << ',' << r.vz << ',' << r.cycle << ','
            << r.gp_x << ',' << r.gp_z << '\n';
}

ModelBundle load_bundle(const std::string& dir) {
    const fs::path base(dir);
    std::ifstream f(base / "spec.json");
    if (!f) throw DataError("cannot open model bundle: " + dir);
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("model spec.json: " + std::string(e.what()));
    }

    ModelBundle bundle;
    bundle.window_cfg.window_size = j.at("window_size").get<int>();
    bundle.window_cfg.step_size = j.at("step_size").get<int>();
    bundle.target_length = j.at("target_length").get<int>();
    bundle.detrended = j.at("detrend").get<bool>();
    bundle.seed = j.at("seed").get<std::uint64_t>();
    const auto& net = j.at("network");
    bundle.spec.encoder_hidden = net.at("encoder_hidden").get<int>();
    bundle.spec.decoder_hidden = net.at("decoder_hidden").get<int>();
    bundle.spec.critic_filters = net.at("critic_filters").get<int>();
    bundle.spec.critic_kernel = net.at("critic_kernel").get<int>();
    bundle.spec.dropout_rate = net.at("dropout_rate").get<double>();
    bundle.spec.leaky_slope = net.at("leaky_slope").get<double>();
    const auto& tr = j.at("train");
    bundle.train_cfg.batch_size = tr.at("batch_size").get<int>();
    bundle.train_cfg.iterations = tr.at("iterations").get<int>();
    bundle.train_cfg.n_critic = tr.at("n_critic").get<int>();
    bundle.train_cfg.learning_rate = tr.at("learning_rate").get<double>();
    bundle.train_cfg.gp_weight = tr.at("gp_weight").get<double>();
    bundle.train_cfg.beta1 = tr.at("beta1").get<double>();
    bundle.train_cfg.beta2 = tr.at("beta2").get<double>();

    auto mins = j.at("norm_min").get<std::vector<double>>();
    auto maxs = j.at("norm_max").get<std::vector<double>>();
    bundle.norm.min = Eigen::Map<Eigen::VectorXd>(mins.data(),
                                                  static_cast<Eigen::Index>(mins.size()));
    bundle.norm.max = Eigen::Map<Eigen::VectorXd>(maxs.data(),
                                                  static_cast<Eigen::Index>(maxs.size()));

    const int channels = j.at("channels").get<int>();
    const int latent = j.at("latent_dim").get<int>();
    nn::Rng rng(0);  // layout construction only; weights are overwritten below
    bundle.model = nn::GanModel<real_t>(bundle.window_cfg.window_size, channels, latent,
                                        bundle.spec, rng);
    read_tensors(bundle.model.enc.params(), base / "encoder.bin");
    read_tensors(bundle.model.dec.params(), base / "decoder.bin");
    read_tensors(bundle.model.critic_x.params(), base / "critic_x.bin");
    read_tensors(bundle.model.critic_z.params(), base / "critic_z.bin");

    std::ifstream log(base / "training_log.csv");
    if (log) {
        std::string line;
        std::getline(log, line);  // header
        while (std::getline(log, line)) {
            if (line.empty()) continue;
            nn::TrainLogRow r;
            char comma;
            std::istringstream ls(line);
            if (ls >> r.iteration >> comma >> r.vx >> comma >> r.vz >> comma >>
                r.cycle >> comma >> r.gp_x >> comma >> r.gp_z)
                bundle.training_log.push_back(r);
        }
    }
    return bundle;
}

InferenceResult reconstruct_windows(const ModelBundle& bundle, const WindowSet& windows,
                                    int batch_size) {
    InferenceResult out;
    const auto N = windows.count();
    out.reconstructions.resize(N);
    out.critic_scores.resize(N);
    const int t = bundle.window_cfg.window_size;
    const int M = bundle.model.channels;

    for (std::size_t begin = 0; begin < N; begin += static_cast<std::size_t>(batch_size)) {
        const std::size_t end = std::min(N, begin + static_cast<std::size_t>(batch_size));
        std::vector<std::size_t> idx(end - begin);
        std::iota(idx.begin(), idx.end(), begin);
        auto x_seq = nn::windows_to_seq<real_t>(windows.windows, idx);
        auto z = bundle.model.enc.forward(x_seq);
        auto recon = bundle.model.dec.forward(z, false, nullptr);
        auto critic = bundle.model.critic_x.forward(x_seq);
        for (std::size_t b = 0; b < idx.size(); ++b) {
            Eigen::MatrixXd w(t, M);
            for (int step = 0; step < t; ++step)
                w.row(step) = recon[static_cast<std::size_t>(step)]
                                  ->value.row(static_cast<Eigen::Index>(b))
                                  .cast<double>();
            out.reconstructions[idx[b]] = std::move(w);
            out.critic_scores[idx[b]] =
                double(critic->value(static_cast<Eigen::Index>(b), 0));
        }
    }
    return out;
}

}  // namespace tsgad
