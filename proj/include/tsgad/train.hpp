#pragma once

// The four-network model and its adversarial training loop: n_critic
// penalized critic ascent steps per iteration followed by one joint
// encoder/decoder step on the full objective.

#include "tsgad/config.hpp"
#include "tsgad/errors.hpp"
#include "tsgad/losses.hpp"
#include "tsgad/nets.hpp"
#include "tsgad/timeseries.hpp"

#include <cmath>
#include <numeric>
#include <vector>

namespace tsgad::nn {

template <typename S>
struct GanModel {
    Encoder<S> enc;
    Decoder<S> dec;
    SeqCritic<S> critic_x;
    SeqCritic<S> critic_z;
    int window_size = 0, channels = 0, latent_dim = 0;
    NetworkSpec spec;

    GanModel() = default;
    GanModel(int t, int M, int k, const NetworkSpec& spec_, Rng& rng)
        : enc(M, k, spec_, rng),
          dec(k, t, M, spec_, rng),
          critic_x(M, t, spec_, spec_.critic_filters, spec_.critic_kernel, rng),
          critic_z(1, k, spec_, spec_.critic_filters, spec_.critic_kernel, rng),
          window_size(t),
          channels(M),
          latent_dim(k),
          spec(spec_) {}

    std::vector<Var<S>> generator_params() const {
        auto p = enc.params();
        for (auto& v : dec.params()) p.push_back(v);
        return p;
    }

    std::vector<Var<S>> all_params() const {
        auto p = generator_params();
        for (auto& v : critic_x.params()) p.push_back(v);
        for (auto& v : critic_z.params()) p.push_back(v);
        return p;
    }
};

// Window batch (rows = batch samples) as a per-step node sequence.
template <typename S>
Seq<S> windows_to_seq(const std::vector<Eigen::MatrixXd>& windows,
                      const std::vector<std::size_t>& idx) {
    if (idx.empty()) throw std::invalid_argument("windows_to_seq: empty batch");
    const auto t = windows[idx[0]].rows();
    const auto M = windows[idx[0]].cols();
    Seq<S> seq(static_cast<std::size_t>(t));
    for (Eigen::Index step = 0; step < t; ++step) {
        Mat<S> m(static_cast<Eigen::Index>(idx.size()), M);
        for (std::size_t b = 0; b < idx.size(); ++b)
            m.row(static_cast<Eigen::Index>(b)) =
                windows[idx[b]].row(step).template cast<S>();
        seq[static_cast<std::size_t>(step)] = ad::constant<S>(std::move(m));
    }
    return seq;
}

template <typename S>
Seq<S> detach_seq(const Seq<S>& xs) {
    Seq<S> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = ad::detach(xs[i]);
    return out;
}

template <typename S>
struct Adam {
    std::vector<Var<S>> params;
    std::vector<Mat<S>> m, v;
    S lr, beta1, beta2, eps = S(1e-8);
    long step_count = 0;

    Adam(std::vector<Var<S>> params_, double lr_, double b1, double b2)
        : params(std::move(params_)),
          lr(static_cast<S>(lr_)),
          beta1(static_cast<S>(b1)),
          beta2(static_cast<S>(b2)) {
        for (const auto& p : params) {
            m.push_back(Mat<S>::Zero(p->value.rows(), p->value.cols()));
            v.push_back(Mat<S>::Zero(p->value.rows(), p->value.cols()));
        }
    }

    void step() {
        ++step_count;
        const S c1 = S(1) - S(std::pow(double(beta1), double(step_count)));
        const S c2 = S(1) - S(std::pow(double(beta2), double(step_count)));
        for (std::size_t i = 0; i < params.size(); ++i) {
            auto& p = params[i];
            if (p->grad.size() == 0) continue;  // no path to the loss this step
            m[i] = beta1 * m[i] + (S(1) - beta1) * p->grad;
            v[i] = (beta2 * v[i].array() + (S(1) - beta2) * p->grad.array().square()).matrix();
            p->value.array() -=
                lr * (m[i].array() / c1) / ((v[i].array() / c2).sqrt() + eps);
        }
    }
};

struct TrainLogRow {
    int iteration = 0;
    double vx = 0.0, vz = 0.0, cycle = 0.0, gp_x = 0.0, gp_z = 0.0;
};

template <typename S>
struct TrainResult {
    GanModel<S> model;
    std::vector<TrainLogRow> log;
};

// Algorithm: per outer iteration, n_critic updates of each critic on its
// penalized Wasserstein objective, then one Adam step of E and G jointly on
// V_X + V_Z + V_L2 (adversarial terms entering with the generator sign).
template <typename S>
TrainResult<S> train(const WindowSet& windows, int channels, int latent_dim,
                     const NetworkSpec& spec, const TrainConfig& cfg,
                     std::uint64_t seed) {
    const auto N = windows.count();
    const auto m = static_cast<std::size_t>(cfg.batch_size);
    if (N < m)
        throw TrainingError("train: need at least batch_size (" +
                            std::to_string(cfg.batch_size) + ") windows, got " +
                            std::to_string(N));
    const int t = static_cast<int>(windows.windows[0].rows());

    Rng rng(seed);
    TrainResult<S> result;
    result.model = GanModel<S>(t, channels, latent_dim, spec, rng);
    auto& model = result.model;

    Adam<S> opt_cx(model.critic_x.params(), cfg.learning_rate, cfg.beta1, cfg.beta2);
    Adam<S> opt_cz(model.critic_z.params(), cfg.learning_rate, cfg.beta1, cfg.beta2);
    Adam<S> opt_g(model.generator_params(), cfg.learning_rate, cfg.beta1, cfg.beta2);

    std::vector<std::size_t> pool(N);
    std::iota(pool.begin(), pool.end(), 0);
    auto sample_batch = [&]() {
        // partial Fisher-Yates: m distinct window indices
        std::vector<std::size_t> idx(m);
        for (std::size_t i = 0; i < m; ++i) {
            std::uniform_int_distribution<std::size_t> d(i, N - 1);
            std::swap(pool[i], pool[d(rng)]);
            idx[i] = pool[i];
        }
        return idx;
    };

    const S lambda = static_cast<S>(cfg.gp_weight);
    auto critic_x_fn = [&](const Seq<S>& xs) { return model.critic_x.forward(xs); };
    auto critic_z_fn = [&](const Seq<S>& zs) { return model.critic_z.forward(zs); };

    for (int iter = 0; iter < cfg.iterations; ++iter) {
        TrainLogRow row;
        row.iteration = iter;
        for (int kappa = 0; kappa < cfg.n_critic; ++kappa) {
            // critic over the data domain
            auto x_seq = windows_to_seq<S>(windows.windows, sample_batch());
            auto z = ad::constant<S>(sample_latent<S>(m, latent_dim, rng));
            auto fake = detach_seq(model.dec.forward(z, true, &rng));
            auto vx = wasserstein_objective<S>(model.critic_x.forward(x_seq),
                                               model.critic_x.forward(fake));
            auto gpx = gradient_penalty<S>(critic_x_fn, x_seq, fake, rng);
            auto loss_cx = ad::add(ad::neg(vx), ad::scale(gpx, lambda));
            ad::backward(loss_cx);
            opt_cx.step();

            // critic over the latent domain
            x_seq = windows_to_seq<S>(windows.windows, sample_batch());
            auto z2 = ad::constant<S>(sample_latent<S>(m, latent_dim, rng));
            auto enc = ad::detach(model.enc.forward(x_seq));
            auto z_steps = latent_as_sequence(z2);
            auto enc_steps = latent_as_sequence(enc);
            auto vz = wasserstein_objective<S>(model.critic_z.forward(z_steps),
                                               model.critic_z.forward(enc_steps));
            auto gpz = gradient_penalty<S>(critic_z_fn, z_steps, enc_steps, rng);
            auto loss_cz = ad::add(ad::neg(vz), ad::scale(gpz, lambda));
            ad::backward(loss_cz);
            opt_cz.step();

            row.vx = double(vx->scalar());
            row.vz = double(vz->scalar());
            row.gp_x = double(gpx->scalar());
            row.gp_z = double(gpz->scalar());
        }

        // joint generator step
        auto x_seq = windows_to_seq<S>(windows.windows, sample_batch());
        auto z = ad::constant<S>(sample_latent<S>(m, latent_dim, rng));
        auto encoded = model.enc.forward(x_seq);
        auto recon = model.dec.forward(encoded, true, &rng);
        auto fake = model.dec.forward(z, true, &rng);
        auto cyc = cycle_loss<S>(x_seq, recon);
        auto adv_x = ad::mean_all(model.critic_x.forward(fake));
        auto adv_z = ad::mean_all(model.critic_z.forward(latent_as_sequence(encoded)));
        auto loss_g = ad::add(ad::sub(ad::neg(adv_x), adv_z), cyc);
        ad::backward(loss_g);
        opt_g.step();

        row.cycle = double(cyc->scalar());
        const double probe =
            row.vx + row.vz + row.cycle + row.gp_x + row.gp_z + double(loss_g->scalar());
        if (!std::isfinite(probe))
            throw TrainingError("train: non-finite loss at iteration " +
                                std::to_string(iter));
        result.log.push_back(row);
    }
    return result;
}

// Inference helpers (dropout disabled).

template <typename S>
Mat<S> encode_batch(const GanModel<S>& model, const Seq<S>& x_seq) {
    return model.enc.forward(x_seq)->value;
}

template <typename S>
std::vector<Mat<S>> decode_batch(const GanModel<S>& model, const Mat<S>& z) {
    auto steps = model.dec.forward(ad::constant<S>(z), false, nullptr);
    std::vector<Mat<S>> out(steps.size());
    for (std::size_t i = 0; i < steps.size(); ++i) out[i] = steps[i]->value;
    return out;  // per-step (batch x M)
}

}  // namespace tsgad::nn
