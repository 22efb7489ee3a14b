#pragma once

// Network building blocks for the adversarial reconstruction model:
// bidirectional LSTM encoder/decoder generators and the two 1-D
// convolutional critics.  Everything is templated on the scalar type so the
// gradient-check tests can run in double while training runs in float.

#include "tsgad/autodiff.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace tsgad::nn {

using ad::Mat;
using ad::Var;

template <typename S>
using Seq = std::vector<Var<S>>;  // one (batch x channels) node per time step

using Rng = std::mt19937_64;

template <typename S>
Mat<S> glorot_uniform(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
    const double limit = std::sqrt(6.0 / double(rows + cols));
    std::uniform_real_distribution<double> dist(-limit, limit);
    Mat<S> m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = static_cast<S>(dist(rng));
    return m;
}

template <typename S>
struct Dense {
    Var<S> W, b;

    Dense() = default;
    Dense(Eigen::Index in, Eigen::Index out, Rng& rng)
        : W(ad::leaf<S>(glorot_uniform<S>(in, out, rng))),
          b(ad::leaf<S>(Mat<S>::Zero(1, out))) {}

    Var<S> forward(const Var<S>& x) const { return ad::add_rowvec(ad::matmul(x, W), b); }

    std::vector<Var<S>> params() const { return {W, b}; }
};

// Fused-gate LSTM cell: [x, h] * W + b -> (i, f, g, o).  Forget bias starts
// at 1.
template <typename S>
struct LstmCell {
    Var<S> W, b;
    Eigen::Index input_dim = 0, hidden = 0;

    LstmCell() = default;
    LstmCell(Eigen::Index in, Eigen::Index h, Rng& rng)
        : W(ad::leaf<S>(glorot_uniform<S>(in + h, 4 * h, rng))),
          b(ad::leaf<S>(Mat<S>::Zero(1, 4 * h))),
          input_dim(in),
          hidden(h) {
        b->value.middleCols(h, h).setOnes();
    }

    void step(const Var<S>& x, Var<S>& h, Var<S>& c) const {
        auto pre = ad::add_rowvec(ad::matmul(ad::concat_cols<S>({x, h}), W), b);
        auto i = ad::sigmoid_(ad::slice_cols(pre, 0, hidden));
        auto f = ad::sigmoid_(ad::slice_cols(pre, hidden, hidden));
        auto g = ad::tanh_(ad::slice_cols(pre, 2 * hidden, hidden));
        auto o = ad::sigmoid_(ad::slice_cols(pre, 3 * hidden, hidden));
        c = ad::add(ad::cmul(f, c), ad::cmul(i, g));
        h = ad::cmul(o, ad::tanh_(c));
    }

    std::vector<Var<S>> params() const { return {W, b}; }
};

// Runs two LSTM directions over a sequence and concatenates their hidden
// states step by step, output dimension 2*hidden.
template <typename S>
struct BiLstm {
    LstmCell<S> fwd, bwd;

    BiLstm() = default;
    BiLstm(Eigen::Index in, Eigen::Index h, Rng& rng) : fwd(in, h, rng), bwd(in, h, rng) {}

    Seq<S> forward(const Seq<S>& xs) const {
        const Eigen::Index batch = xs[0]->value.rows();
        const std::size_t T = xs.size();
        Seq<S> hs_f(T), hs_b(T);
        Var<S> h = ad::constant<S>(Mat<S>::Zero(batch, fwd.hidden));
        Var<S> c = h;
        for (std::size_t t = 0; t < T; ++t) {
            fwd.step(xs[t], h, c);
            hs_f[t] = h;
        }
        h = ad::constant<S>(Mat<S>::Zero(batch, bwd.hidden));
        c = h;
        for (std::size_t t = T; t-- > 0;) {
            bwd.step(xs[t], h, c);
            hs_b[t] = h;
        }
        Seq<S> out(T);
        for (std::size_t t = 0; t < T; ++t) out[t] = ad::concat_cols<S>({hs_f[t], hs_b[t]});
        return out;
    }

    std::vector<Var<S>> params() const {
        auto p = fwd.params();
        auto q = bwd.params();
        p.insert(p.end(), q.begin(), q.end());
        return p;
    }
};

// Inverted dropout; mask drawn from the caller's RNG so training stays
// deterministic under a fixed seed.
template <typename S>
Var<S> dropout(const Var<S>& x, double rate, Rng& rng) {
    if (rate <= 0.0) return x;
    std::bernoulli_distribution keep(1.0 - rate);
    Mat<S> mask(x->value.rows(), x->value.cols());
    const S scale = static_cast<S>(1.0 / (1.0 - rate));
    for (Eigen::Index i = 0; i < mask.rows(); ++i)
        for (Eigen::Index j = 0; j < mask.cols(); ++j)
            mask(i, j) = keep(rng) ? scale : S(0);
    return ad::cmul(x, ad::constant<S>(std::move(mask)));
}

// Valid (no padding) 1-D convolution over a sequence of (batch x in) steps.
template <typename S>
struct Conv1d {
    std::vector<Var<S>> taps;  // kernel weights, one (in x out) matrix per offset
    Var<S> b;

    Conv1d() = default;
    Conv1d(Eigen::Index in, Eigen::Index out, int kernel, Rng& rng) {
        taps.reserve(kernel);
        for (int d = 0; d < kernel; ++d)
            taps.push_back(ad::leaf<S>(glorot_uniform<S>(in, out, rng)));
        b = ad::leaf<S>(Mat<S>::Zero(1, out));
    }

    Seq<S> forward(const Seq<S>& xs) const {
        const std::size_t K = taps.size();
        if (xs.size() < K) throw std::invalid_argument("conv1d: sequence shorter than kernel");
        Seq<S> out(xs.size() - K + 1);
        for (std::size_t j = 0; j < out.size(); ++j) {
            Var<S> acc = ad::matmul(xs[j], taps[0]);
            for (std::size_t d = 1; d < K; ++d)
                acc = ad::add(acc, ad::matmul(xs[j + d], taps[d]));
            out[j] = ad::add_rowvec(acc, b);
        }
        return out;
    }

    std::vector<Var<S>> params() const {
        auto p = taps;
        p.push_back(b);
        return p;
    }
};

// Architecture hyperparameters.  Defaults match the reference configuration:
// 1-layer bidirectional LSTM encoder with 100 units, 2-layer bidirectional
// LSTM decoder with 64 units each and dropout, 1-D convolutional critics.
struct NetworkSpec {
    int encoder_hidden = 100;
    int decoder_hidden = 64;
    int critic_filters = 64;
    int critic_kernel = 5;
    double dropout_rate = 0.2;
    double leaky_slope = 0.2;
};

// E: window (t steps x M channels) -> latent k-vector.  Last forward and
// backward hidden states feed a dense head.
template <typename S>
struct Encoder {
    BiLstm<S> rnn;
    Dense<S> head;
    Eigen::Index channels = 0, latent = 0;

    Encoder() = default;
    Encoder(Eigen::Index channels_, Eigen::Index latent_, const NetworkSpec& spec, Rng& rng)
        : rnn(channels_, spec.encoder_hidden, rng),
          head(2 * spec.encoder_hidden, latent_, rng),
          channels(channels_),
          latent(latent_) {}

    Var<S> forward(const Seq<S>& window) const {
        if (window.empty()) throw std::invalid_argument("encode: empty window");
        auto hs = rnn.forward(window);
        const Eigen::Index H = rnn.fwd.hidden;
        // forward direction's final state is at the last step, backward's at step 0
        auto last = ad::concat_cols<S>({ad::slice_cols(hs.back(), 0, H),
                                        ad::slice_cols(hs.front(), H, H)});
        return head.forward(last);
    }

    std::vector<Var<S>> params() const {
        auto p = rnn.params();
        auto q = head.params();
        p.insert(p.end(), q.begin(), q.end());
        return p;
    }
};

// G: latent k-vector -> window.  The latent vector is unrolled as a length-k
// sequence of scalars, run through the first recurrent layer, upsampled to
// the output length, then refined by the second layer and a per-step head.
template <typename S>
struct Decoder {
    BiLstm<S> l1, l2;
    Dense<S> head;
    Eigen::Index latent = 0, out_len = 0, channels = 0;
    double dropout_rate = 0.0;

    Decoder() = default;
    Decoder(Eigen::Index latent_, Eigen::Index out_len_, Eigen::Index channels_,
            const NetworkSpec& spec, Rng& rng)
        : l1(1, spec.decoder_hidden, rng),
          l2(2 * spec.decoder_hidden, spec.decoder_hidden, rng),
          head(2 * spec.decoder_hidden, channels_, rng),
          latent(latent_),
          out_len(out_len_),
          channels(channels_),
          dropout_rate(spec.dropout_rate) {}

    // train=true applies dropout using rng; inference passes train=false.
    Seq<S> forward(const Var<S>& z, bool train, Rng* rng) const {
        if (z->value.cols() != latent) throw std::invalid_argument("decode: bad latent dim");
        Seq<S> zs(latent);
        for (Eigen::Index j = 0; j < latent; ++j) zs[j] = ad::slice_cols(z, j, 1);
        if (train) for (auto& s : zs) s = dropout(s, dropout_rate, *rng);
        auto h1 = l1.forward(zs);
        // nearest-neighbour upsample from latent length to window length
        Seq<S> up(out_len);
        for (Eigen::Index j = 0; j < out_len; ++j) {
            auto src = static_cast<std::size_t>((j * latent) / out_len);
            up[j] = h1[src];
        }
        if (train) {
            Seq<S> dropped(out_len);
            for (Eigen::Index j = 0; j < out_len; ++j) dropped[j] = dropout(up[j], dropout_rate, *rng);
            up = std::move(dropped);
        }
        auto h2 = l2.forward(up);
        Seq<S> out(out_len);
        for (Eigen::Index j = 0; j < out_len; ++j) out[j] = head.forward(h2[j]);
        return out;
    }

    std::vector<Var<S>> params() const {
        std::vector<Var<S>> p = l1.params();
        for (auto& v : l2.params()) p.push_back(v);
        for (auto& v : head.params()) p.push_back(v);
        return p;
    }
};

// Critic over sequences: one 1-D convolutional layer, leaky ReLU, then a
// dense scalar head on the flattened feature map.
template <typename S>
struct SeqCritic {
    Conv1d<S> conv;
    Dense<S> head;
    double leaky_slope = 0.2;

    SeqCritic() = default;
    SeqCritic(Eigen::Index channels, Eigen::Index seq_len, const NetworkSpec& spec,
              int filters, int kernel, Rng& rng)
        : conv(channels, filters, std::min<int>(kernel, static_cast<int>(seq_len)), rng),
          head((seq_len - std::min<Eigen::Index>(kernel, seq_len) + 1) * filters, 1, rng),
          leaky_slope(spec.leaky_slope) {}

    // Returns one scalar per batch row (batch x 1).
    Var<S> forward(const Seq<S>& xs) const {
        auto feats = conv.forward(xs);
        for (auto& f : feats) f = ad::leaky_relu(f, static_cast<S>(leaky_slope));
        return head.forward(ad::concat_cols<S>(feats));
    }

    std::vector<Var<S>> params() const {
        auto p = conv.params();
        for (auto& v : head.params()) p.push_back(v);
        return p;
    }
};

// Splits a (batch x k) latent block into a length-k sequence of scalars, the
// layout both the decoder and the latent critic consume.
template <typename S>
Seq<S> latent_as_sequence(const Var<S>& z) {
    Seq<S> zs(z->value.cols());
    for (Eigen::Index j = 0; j < z->value.cols(); ++j) zs[j] = ad::slice_cols(z, j, 1);
    return zs;
}

}  // namespace tsgad::nn
