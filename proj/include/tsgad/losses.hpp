#pragma once

// Adversarial and cycle-consistency objectives, plus the gradient penalty
// that enforces the critics' 1-Lipschitz constraint.

#include "tsgad/nets.hpp"

#include <functional>
#include <random>

namespace tsgad::nn {

// i.i.d. standard normal latent batch (n x k), reproducible from the seed.
template <typename S>
Mat<S> sample_latent(Eigen::Index n, Eigen::Index k, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("sample_latent: n must be positive");
    Rng rng(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    Mat<S> z(n, k);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < k; ++j) z(i, j) = static_cast<S>(dist(rng));
    return z;
}

template <typename S>
Mat<S> sample_latent(Eigen::Index n, Eigen::Index k, Rng& rng) {
    std::normal_distribution<double> dist(0.0, 1.0);
    Mat<S> z(n, k);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < k; ++j) z(i, j) = static_cast<S>(dist(rng));
    return z;
}

// V = mean(critic(real)) - mean(critic(fake)); the Wasserstein objective for
// either critic once real/fake are expressed in its input domain.
template <typename S>
Var<S> wasserstein_objective(const Var<S>& critic_real, const Var<S>& critic_fake) {
    return ad::sub(ad::mean_all(critic_real), ad::mean_all(critic_fake));
}

// Mean over the batch of the Euclidean norm of (x - x_hat), flattened over
// all steps and channels.
template <typename S>
Var<S> cycle_loss(const Seq<S>& real, const Seq<S>& recon) {
    if (real.empty() || real.size() != recon.size())
        throw std::invalid_argument("cycle_loss: shape mismatch");
    Var<S> ssq;
    for (std::size_t t = 0; t < real.size(); ++t) {
        auto sq = ad::rowwise_sum(ad::square_(ad::sub(real[t], recon[t])));
        ssq = ssq ? ad::add(ssq, sq) : sq;
    }
    return ad::mean_all(ad::sqrt_(ssq));
}

// Gradient penalty of Gulrajani et al.: mean over per-sample uniform
// interpolates u = eps*real + (1-eps)*fake of (||grad_u critic(u)|| - 1)^2.
// The inner gradient is built as a differentiable graph so the penalty can
// be backpropagated into the critic parameters.
template <typename S>
Var<S> gradient_penalty(const std::function<Var<S>(const Seq<S>&)>& critic,
                        const Seq<S>& real, const Seq<S>& fake, Rng& rng) {
    if (real.size() != fake.size())
        throw std::invalid_argument("gradient_penalty: shape mismatch");
    const Eigen::Index batch = real[0]->value.rows();
    const Eigen::Index cols = real[0]->value.cols();
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    Mat<S> eps(batch, 1);
    for (Eigen::Index i = 0; i < batch; ++i) eps(i, 0) = static_cast<S>(uni(rng));

    Seq<S> interp(real.size());
    for (std::size_t t = 0; t < real.size(); ++t) {
        Mat<S> u = eps.replicate(1, cols).cwiseProduct(real[t]->value) +
                   (Mat<S>::Ones(batch, cols) - eps.replicate(1, cols))
                       .cwiseProduct(fake[t]->value);
        interp[t] = ad::leaf<S>(std::move(u));
    }

    // summing over the batch yields per-sample input gradients (row-wise
    // independence of every op)
    auto total = ad::sum_all(critic(interp));
    auto grads = ad::backward_graph<S>(total, interp);

    Var<S> norm_sq;
    for (auto& g : grads) {
        auto sq = ad::rowwise_sum(ad::square_(g));
        norm_sq = norm_sq ? ad::add(norm_sq, sq) : sq;
    }
    auto norm = ad::sqrt_(norm_sq);
    auto ones = ad::constant<S>(Mat<S>::Ones(batch, 1));
    return ad::mean_all(ad::square_(ad::sub(norm, ones)));
}

}  // namespace tsgad::nn
