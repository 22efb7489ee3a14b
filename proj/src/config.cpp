#include "tsgad/config.hpp"

#include "tsgad/errors.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace tsgad {

void PipelineConfig::validate() const {
    if (window_size < 1) throw ConfigError("window_size must be positive");
    if (step_size < 1) throw ConfigError("step_size must be positive");
    if (target_length < 2) throw ConfigError("target_length must be >= 2");
    if (latent_dim < 1) throw ConfigError("latent_dim must be positive");
    if (network.encoder_hidden < 1 || network.decoder_hidden < 1 ||
        network.critic_filters < 1 || network.critic_kernel < 1)
        throw ConfigError("network sizes must be positive");
    if (network.dropout_rate < 0.0 || network.dropout_rate >= 1.0)
        throw ConfigError("dropout_rate must lie in [0,1)");
    if (train.batch_size < 1) throw ConfigError("batch_size must be positive");
    if (train.iterations < 1) throw ConfigError("iterations must be positive");
    if (train.n_critic < 1) throw ConfigError("n_critic must be positive");
    if (train.learning_rate <= 0.0) throw ConfigError("learning_rate must be positive");
    if (train.gp_weight <= 0.0) throw ConfigError("gp_weight must be positive");
    if (error.half_window < 1) throw ConfigError("half_window must be positive");
    if (fusion.alpha < 0.0 || fusion.alpha > 1.0)
        throw ConfigError("alpha must lie in [0,1]");
    if (threshold.window_fraction <= 0.0 || threshold.window_fraction > 1.0 ||
        threshold.step_fraction <= 0.0 ||
        threshold.step_fraction > threshold.window_fraction)
        throw ConfigError("require 0 < step_fraction <= window_fraction <= 1");
    if (threshold.sigmas <= 0.0) throw ConfigError("sigmas must be positive");
    if (prune_cfg.theta <= 0.0 || prune_cfg.theta >= 1.0)
        throw ConfigError("theta must lie in (0,1)");
    if (merge_gap < 0) throw ConfigError("merge_gap must be non-negative");
}

ErrorMethod parse_error_method(const std::string& s) {
    if (s == "point") return ErrorMethod::point;
    if (s == "area") return ErrorMethod::area;
    if (s == "dtw") return ErrorMethod::dtw;
    throw ConfigError("unknown error method '" + s + "' (expected point|area|dtw)");
}

FusionMode parse_fusion_mode(const std::string& s) {
    if (s == "critic") return FusionMode::critic_only;
    if (s == "error") return FusionMode::error_only;
    if (s == "convex") return FusionMode::convex;
    if (s == "product") return FusionMode::product;
    throw ConfigError("unknown fusion mode '" + s +
                      "' (expected critic|error|convex|product)");
}

std::string to_string(ErrorMethod m) {
    switch (m) {
        case ErrorMethod::point: return "point";
        case ErrorMethod::area: return "area";
        case ErrorMethod::dtw: return "dtw";
    }
    return "?";
}

std::string to_string(FusionMode m) {
    switch (m) {
        case FusionMode::critic_only: return "critic";
        case FusionMode::error_only: return "error";
        case FusionMode::convex: return "convex";
        case FusionMode::product: return "product";
    }
    return "?";
}

namespace {

// string -> setter; every accepted key appears here, anything else is an error
using Setter = std::function<void(PipelineConfig&, const std::string&)>;

int to_int(const std::string& k, const std::string& v) {
    try {
        std::size_t pos = 0;
        int x = std::stoi(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + k + "': invalid integer '" + v + "'");
    }
}

double to_dbl(const std::string& k, const std::string& v) {
    try {
        std::size_t pos = 0;
        double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + k + "': invalid number '" + v + "'");
    }
}

bool to_bool(const std::string& k, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("config key '" + k + "': invalid boolean '" + v + "'");
}

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"window_size", [](auto& c, const auto& v) { c.window_size = to_int("window_size", v); }},
        {"step_size", [](auto& c, const auto& v) { c.step_size = to_int("step_size", v); }},
        {"target_length", [](auto& c, const auto& v) { c.target_length = to_int("target_length", v); }},
        {"detrend", [](auto& c, const auto& v) { c.detrend = to_bool("detrend", v); }},
        {"latent_dim", [](auto& c, const auto& v) { c.latent_dim = to_int("latent_dim", v); }},
        {"encoder_hidden", [](auto& c, const auto& v) { c.network.encoder_hidden = to_int("encoder_hidden", v); }},
        {"decoder_hidden", [](auto& c, const auto& v) { c.network.decoder_hidden = to_int("decoder_hidden", v); }},
        {"critic_filters", [](auto& c, const auto& v) { c.network.critic_filters = to_int("critic_filters", v); }},
        {"critic_kernel", [](auto& c, const auto& v) { c.network.critic_kernel = to_int("critic_kernel", v); }},
        {"dropout_rate", [](auto& c, const auto& v) { c.network.dropout_rate = to_dbl("dropout_rate", v); }},
        {"batch_size", [](auto& c, const auto& v) { c.train.batch_size = to_int("batch_size", v); }},
        {"iterations", [](auto& c, const auto& v) { c.train.iterations = to_int("iterations", v); }},
        {"n_critic", [](auto& c, const auto& v) { c.train.n_critic = to_int("n_critic", v); }},
        {"learning_rate", [](auto& c, const auto& v) { c.train.learning_rate = to_dbl("learning_rate", v); }},
        {"gp_weight", [](auto& c, const auto& v) { c.train.gp_weight = to_dbl("gp_weight", v); }},
        {"error", [](auto& c, const auto& v) { c.error.method = parse_error_method(v); }},
        {"half_window", [](auto& c, const auto& v) { c.error.half_window = to_int("half_window", v); }},
        {"fusion", [](auto& c, const auto& v) { c.fusion.mode = parse_fusion_mode(v); }},
        {"alpha", [](auto& c, const auto& v) { c.fusion.alpha = to_dbl("alpha", v); }},
        {"product_scale", [](auto& c, const auto& v) { c.fusion.product_scale = to_dbl("product_scale", v); }},
        {"smooth",
         [](auto& c, const auto& v) {
             if (v == "mode") c.smooth = SmoothMode::density_mode;
             else if (v == "max") c.smooth = SmoothMode::raw_max;
             else throw ConfigError("config key 'smooth': expected mode|max");
         }},
        {"window_fraction", [](auto& c, const auto& v) { c.threshold.window_fraction = to_dbl("window_fraction", v); }},
        {"step_fraction", [](auto& c, const auto& v) { c.threshold.step_fraction = to_dbl("step_fraction", v); }},
        {"sigmas", [](auto& c, const auto& v) { c.threshold.sigmas = to_dbl("sigmas", v); }},
        {"theta", [](auto& c, const auto& v) { c.prune_cfg.theta = to_dbl("theta", v); }},
        {"merge_gap", [](auto& c, const auto& v) { c.merge_gap = to_int("merge_gap", v); }},
        {"seed",
         [](auto& c, const auto& v) {
             try {
                 c.seed = std::stoull(v);
             } catch (const std::exception&) {
                 throw ConfigError("config key 'seed': invalid integer '" + v + "'");
             }
         }},
    };
    return table;
}

void apply_key(PipelineConfig& cfg, const std::string& key, const std::string& value) {
    auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError("unknown config key '" + key + "'");
    it->second(cfg, value);
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

}  // namespace

PipelineConfig parse_config_text(const std::string& text, const PipelineConfig& base) {
    PipelineConfig cfg = base;
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(text);
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(std::string("config JSON: ") + e.what());
        }
        for (const auto& [key, val] : j.items()) {
            std::string s;
            if (val.is_string()) s = val.get<std::string>();
            else if (val.is_boolean()) s = val.get<bool>() ? "true" : "false";
            else if (val.is_number_integer()) s = std::to_string(val.get<long long>());
            else if (val.is_number()) {
                std::ostringstream os;
                os.precision(17);
                os << val.get<double>();
                s = os.str();
            } else
                throw ConfigError("config key '" + key + "': unsupported value type");
            apply_key(cfg, key, s);
        }
    } else {
        std::istringstream in(text);
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            auto t = trim(line);
            if (t.empty() || t[0] == '#') continue;
            auto eq = t.find('=');
            if (eq == std::string::npos)
                throw ConfigError("config line " + std::to_string(lineno) +
                                  ": expected key = value");
            apply_key(cfg, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
        }
    }
    cfg.validate();
    return cfg;
}

PipelineConfig load_config_file(const std::string& path, const PipelineConfig& base) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file: " + path);
    std::stringstream buf;
    buf << f.rdbuf();
    return parse_config_text(buf.str(), base);
}

}  // namespace tsgad
