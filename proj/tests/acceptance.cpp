// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
// criterion fails.  The end-to-end criteria train real models and take a few
// minutes; everything is seeded and self-contained.

#include "tsgad/losses.hpp"
#include "tsgad/pipeline.hpp"
#include "tsgad/synth.hpp"
#include "tsgad/train.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <vector>

using namespace tsgad;
using nn::cycle_loss;
using nn::gradient_penalty;
using nn::sample_latent;
using nn::wasserstein_objective;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(const std::string& name, bool ok, const std::string& detail = "") {
    std::cout << (ok ? "PASS" : "FAIL") << "  " << name;
    if (!detail.empty()) std::cout << "  (" << detail << ")";
    std::cout << std::endl;
    if (!ok) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------- dtw oracle

// every monotone warp path, evaluated explicitly
double dtw_exhaustive(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    const int n = int(a.size()), m = int(b.size());
    double best = std::numeric_limits<double>::infinity();
    struct Frame {
        int i, j, k;
        double sum;
    };
    std::vector<Frame> stack{{0, 0, 1, (a(0) - b(0)) * (a(0) - b(0))}};
    while (!stack.empty()) {
        auto f = stack.back();
        stack.pop_back();
        if (f.i == n - 1 && f.j == m - 1) {
            best = std::min(best, std::sqrt(f.sum) / double(f.k));
            continue;
        }
        auto push = [&](int i, int j) {
            if (i < n && j < m)
                stack.push_back({i, j, f.k + 1, f.sum + (a(i) - b(j)) * (a(i) - b(j))});
        };
        push(f.i + 1, f.j);
        push(f.i, f.j + 1);
        push(f.i + 1, f.j + 1);
    }
    return best;
}

void criterion_dtw_oracle() {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937 rng(1001);
    std::uniform_real_distribution<double> val(-3, 3);
    std::uniform_int_distribution<int> len(1, 6);
    bool ok = true;
    for (int trial = 0; trial < 100 && ok; ++trial) {
        Eigen::VectorXd a(len(rng)), b(len(rng));
        for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = val(rng);
        for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = val(rng);
        ok = dtw_distance(a, b) == dtw_exhaustive(a, b);
    }
    const double secs = seconds_since(t0);
    ok = ok && secs < 10.0;
    std::ostringstream d;
    d << "100 trials, " << secs << " s";
    report("dtw matches exhaustive path enumeration", ok, d.str());
}

// --------------------------------------------------------------- area oracle

void criterion_area_oracle() {
    std::mt19937 rng(1002);
    std::uniform_real_distribution<double> coef(-2, 2);
    std::uniform_int_distribution<int> ldist(1, 12);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const int T = 60;
        const int l = ldist(rng);
        // piecewise-linear difference: the trapezoid rule is exact, so the
        // analytic antiderivative of p(t) = c1*t + c0 is the reference
        const double c1 = coef(rng), c0 = coef(rng);
        Eigen::VectorXd x(T), xh = Eigen::VectorXd::Zero(T);
        for (int t = 0; t < T; ++t) x(t) = c1 * t + c0;
        auto s = error_area(x, xh, l);
        for (int t = 0; t < T; ++t) {
            const double a = std::max(0, t - l), b = std::min(T - 1, t + l);
            const double integral = c1 / 2.0 * (b * b - a * a) + c0 * (b - a);
            worst = std::max(worst, std::abs(s(t) - std::abs(integral) / (b - a)));
        }
    }
    std::ostringstream d;
    d << "max deviation " << worst;
    report("area error matches analytic integrals", worst < 1e-9, d.str());
}

// ----------------------------------------------------------- gradient checks

using D = double;
using VarD = ad::Var<D>;
using MatD = ad::Mat<D>;
using SeqD = nn::Seq<D>;

nn::NetworkSpec micro_spec() {
    nn::NetworkSpec s;
    s.encoder_hidden = 3;
    s.decoder_hidden = 3;
    s.critic_filters = 2;
    s.critic_kernel = 2;
    s.dropout_rate = 0.0;
    return s;
}

SeqD random_batch(nn::Rng& rng, int t, int batch, int m) {
    std::normal_distribution<double> dist(0.0, 1.0);
    SeqD seq(static_cast<std::size_t>(t));
    for (int s = 0; s < t; ++s) {
        MatD x(batch, m);
        for (int i = 0; i < batch; ++i)
            for (int j = 0; j < m; ++j) x(i, j) = dist(rng);
        seq[static_cast<std::size_t>(s)] = ad::constant<D>(std::move(x));
    }
    return seq;
}

// worst relative deviation between analytic and central-difference gradients
double max_gradient_deviation(const std::vector<VarD>& params,
                              const std::function<VarD()>& loss) {
    // backward() only clears gradients of nodes reachable from the current
    // loss, so drop any gradients left over from a previous check first
    for (auto& p : params) p->grad.resize(0, 0);
    auto l = loss();
    ad::backward(l);
    std::vector<MatD> analytic;
    for (const auto& p : params)
        analytic.push_back(p->grad.size() ? p->grad
                                          : MatD::Zero(p->value.rows(), p->value.cols()));
    const double h = 1e-5;
    double worst = 0.0;
    for (std::size_t pi = 0; pi < params.size(); ++pi) {
        auto& p = params[pi];
        for (Eigen::Index i = 0; i < p->value.rows(); ++i)
            for (Eigen::Index j = 0; j < p->value.cols(); ++j) {
                const double orig = p->value(i, j);
                p->value(i, j) = orig + h;
                const double fp = loss()->scalar();
                p->value(i, j) = orig - h;
                const double fm = loss()->scalar();
                p->value(i, j) = orig;
                const double fd = (fp - fm) / (2.0 * h);
                const double an = analytic[pi](i, j);
                worst = std::max(worst, std::abs(fd - an) /
                                            std::max({1e-6, std::abs(fd), std::abs(an)}));
            }
    }
    return worst;
}

void criterion_gradient_check() {
    constexpr int t = 4, k = 2, m = 1, batch = 3;
    nn::Rng rng(1003);
    nn::GanModel<D> model(t, m, k, micro_spec(), rng);
    auto real_batch = random_batch(rng, t, batch, m);
    auto z = ad::constant<D>(sample_latent<D>(batch, k, rng));

    double worst = 0.0;

    // V_X
    worst = std::max(worst, max_gradient_deviation(model.all_params(), [&] {
        auto fake = model.dec.forward(z, false, nullptr);
        return wasserstein_objective<D>(model.critic_x.forward(real_batch),
                                        model.critic_x.forward(fake));
    }));

    // V_Z
    worst = std::max(worst, max_gradient_deviation(model.all_params(), [&] {
        auto enc = model.enc.forward(real_batch);
        return wasserstein_objective<D>(
            model.critic_z.forward(nn::latent_as_sequence(z)),
            model.critic_z.forward(nn::latent_as_sequence(enc)));
    }));

    // V_L2 (cycle)
    worst = std::max(worst, max_gradient_deviation(model.generator_params(), [&] {
        auto recon = model.dec.forward(model.enc.forward(real_batch), false, nullptr);
        return cycle_loss<D>(real_batch, recon);
    }));

    // gradient penalty (second-order path)
    worst = std::max(worst, max_gradient_deviation(model.critic_x.params(), [&] {
        nn::Rng gp_rng(7);
        auto fake = model.dec.forward(z, false, nullptr);
        auto critic = [&](const SeqD& xs) { return model.critic_x.forward(xs); };
        return gradient_penalty<D>(critic, real_batch, fake, gp_rng);
    }));

    std::ostringstream d;
    d << "max relative deviation " << worst;
    report("loss gradients match finite differences", worst < 1e-4, d.str());
}

void criterion_gp_fixed_points() {
    constexpr int t = 4, m = 1, batch = 3;
    nn::Rng rng(1004);
    auto real_batch = random_batch(rng, t, batch, m);
    auto fake = random_batch(rng, t, batch, m);

    // critic(x) = mean over steps of the per-sample sum: gradient w.r.t.
    // every input entry is 1/t, so |grad| = sqrt(t*m)/t = 1/sqrt(t) ... use
    // sum over steps instead: gradient exactly 1 per entry => |g| = sqrt(t*m)
    auto sum_critic = [&](const SeqD& xs) {
        auto acc = ad::rowwise_sum(xs[0]);
        for (std::size_t i = 1; i < xs.size(); ++i)
            acc = ad::add(acc, ad::rowwise_sum(xs[i]));
        return acc;
    };
    // scale so the gradient norm is exactly 1
    const double inv = 1.0 / std::sqrt(double(t * m));
    auto unit_critic = [&](const SeqD& xs) { return ad::scale(sum_critic(xs), inv); };
    auto constant_critic = [&](const SeqD& xs) {
        return ad::constant<D>(MatD::Zero(xs[0]->value.rows(), 1));
    };

    nn::Rng r1(1), r2(2);
    const double unit_gp = gradient_penalty<D>(unit_critic, real_batch, fake, r1)->scalar();
    const double const_gp =
        gradient_penalty<D>(constant_critic, real_batch, fake, r2)->scalar();

    std::ostringstream d;
    d << "unit-gradient " << unit_gp << ", constant " << const_gp;
    report("gradient-penalty fixed points", std::abs(unit_gp) < 1e-6 && const_gp == 1.0,
           d.str());
}

// -------------------------------------------------------------- end to end

struct SeedOutcome {
    double f1 = 0.0;
    double seconds = 0.0;  // wall-clock of this run (train + detect)
    double mean_abs_err = 0.0;
    double critic_separation = 0.0;  // mean Cx(real) - mean Cx(G(z))
    double cycle_first = 0.0, cycle_last = 0.0;
};

PipelineConfig e2e_config() {
    PipelineConfig cfg;  // default sizes: t=100, k=20, batch 64, n_critic 5
    cfg.train.iterations = 500;
    cfg.error.method = ErrorMethod::dtw;
    cfg.fusion.mode = FusionMode::product;
    return cfg;
}

SeedOutcome run_seed(const TimeSeries& signal, const GroundTruthWindows& truth,
                     std::uint64_t seed) {
    auto cfg = e2e_config();
    cfg.seed = seed;
    const auto t0 = std::chrono::steady_clock::now();
    auto bundle = train_pipeline(signal, cfg);
    auto out = detect_pipeline(signal, bundle, cfg);

    SeedOutcome o;
    o.seconds = seconds_since(t0);
    o.f1 = prf1(confusion(truth, to_predicted_windows(out))).f1;
    o.mean_abs_err = (out.x - out.x_hat).cwiseAbs().mean();

    // critic separation: Cx on real windows vs Cx on decoded noise
    auto prepared = preprocess_like(signal, bundle);
    auto windows = make_windows(prepared, bundle.window_cfg);
    auto infer = reconstruct_windows(bundle, windows);
    double real_mean = 0.0;
    for (double c : infer.critic_scores) real_mean += c;
    real_mean /= double(infer.critic_scores.size());

    nn::Rng rng(seed + 1);
    const int batch = 64;
    auto z = sample_latent<real_t>(batch, bundle.model.latent_dim, rng);
    auto fake_steps = decode_batch(bundle.model, z);
    nn::Seq<real_t> fake(fake_steps.size());
    for (std::size_t i = 0; i < fake_steps.size(); ++i)
        fake[i] = ad::constant<real_t>(fake_steps[i]);
    const double fake_mean =
        double(ad::mean_all(bundle.model.critic_x.forward(fake))->scalar());
    o.critic_separation = real_mean - fake_mean;

    const auto& log = bundle.training_log;
    for (int i = 0; i < 50; ++i) {
        o.cycle_first += log[static_cast<std::size_t>(i)].cycle / 50.0;
        o.cycle_last += log[log.size() - 50 + static_cast<std::size_t>(i)].cycle / 50.0;
    }
    return o;
}

std::pair<TimeSeries, GroundTruthWindows> e2e_corpus() {
    SynthConfig sc;  // T=2000, 2 point + 3 collective anomalies
    return generate_synthetic(sc, 42);
}

void criterion_end_to_end() {
    auto [signal, truth] = e2e_corpus();

    // Seeds run one after another so each run's wall-clock reflects the
    // single-run budget rather than contention between concurrent trainings.
    const std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
    std::vector<SeedOutcome> outcomes;
    for (auto s : seeds) outcomes.push_back(run_seed(signal, truth, s));

    std::vector<double> f1s;
    double slowest = 0.0;
    for (const auto& o : outcomes) {
        f1s.push_back(o.f1);
        slowest = std::max(slowest, o.seconds);
    }
    std::sort(f1s.begin(), f1s.end());
    const double median_f1 = f1s[f1s.size() / 2];

    std::ostringstream d;
    d << "median F1 " << median_f1 << " over seeds {";
    for (std::size_t i = 0; i < outcomes.size(); ++i)
        d << (i ? " " : "") << outcomes[i].f1;
    d << "}, slowest run " << slowest << " s";
    report("end-to-end synthetic run (500 iterations x 5 seeds)",
           median_f1 >= 0.8 && slowest < 900.0, d.str());

    int reconstruction_ok = 0, separation_ok = 0, cycle_ok = 0;
    for (const auto& o : outcomes) {
        reconstruction_ok += o.mean_abs_err < 0.2;
        separation_ok += o.critic_separation > 0.0;
        cycle_ok += o.cycle_last < o.cycle_first;
    }
    std::ostringstream d2;
    d2 << reconstruction_ok << "/5 mean|x-x_hat|<0.2, " << separation_ok
       << "/5 critic separation, " << cycle_ok << "/5 cycle improved";
    report("training-quality invariants on the same runs",
           reconstruction_ok >= 3 && separation_ok >= 3 && cycle_ok >= 3, d2.str());
}

// ----------------------------------------------------------------- ablation

void criterion_ablation() {
    auto [signal, truth] = e2e_corpus();
    auto cfg = e2e_config();
    cfg.seed = 3;

    const long trainings_before = train_call_count();
    auto bundle = train_pipeline(signal, cfg);

    std::map<std::string, double> f1;
    for (const auto& variant : ablation_variants()) {
        auto vcfg = variant_config(cfg, variant);
        auto out = detect_pipeline(signal, bundle, vcfg);  // same model throughout
        f1[variant] = prf1(confusion(truth, to_predicted_windows(out))).f1;
    }
    const long trainings = train_call_count() - trainings_before;

    const double critic_only = f1.at("critic");
    bool ok = trainings == 1;
    std::ostringstream d;
    d << "critic-only " << critic_only << ";";
    for (const auto& name : {"convex_point", "convex_area", "convex_dtw", "product_point",
                             "product_area", "product_dtw"}) {
        d << " " << name << " " << f1.at(name);
        ok = ok && f1.at(name) >= critic_only - 0.1;
    }
    report("fused ablation variants within 0.1 of critic-only", ok, d.str());
}

// -------------------------------------------------------------- determinism

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void criterion_determinism() {
    const fs::path dir = fs::temp_directory_path() / "tsgad_acceptance_det";
    fs::remove_all(dir);
    fs::create_directories(dir);

    SynthConfig sc;
    sc.length = 700;
    sc.point_anomalies = 1;
    sc.collective_anomalies = 2;
    auto [ts, truth] = generate_synthetic(sc, 9);
    save_signal(ts, (dir / "sig.csv").string());
    save_labels(truth, (dir / "lab.json").string());
    std::vector<ManifestEntry> manifest{
        {"synth", (dir / "sig.csv").string(), (dir / "lab.json").string()}};

    PipelineConfig cfg;
    cfg.window_size = 40;
    cfg.latent_dim = 5;
    cfg.network.encoder_hidden = 16;
    cfg.network.decoder_hidden = 12;
    cfg.network.critic_filters = 8;
    cfg.network.critic_kernel = 3;
    cfg.train.batch_size = 32;
    cfg.train.iterations = 30;
    cfg.train.n_critic = 2;
    cfg.seed = 5;

    run_benchmark(manifest, cfg, (dir / "run1").string());
    run_benchmark(manifest, cfg, (dir / "run2").string());

    const bool anoms_equal = slurp(dir / "run1/synth/sig/anomalies.json") ==
                             slurp(dir / "run2/synth/sig/anomalies.json");
    const bool reports_equal =
        slurp(dir / "run1/report.csv") == slurp(dir / "run2/report.csv");
    const bool nonempty = !slurp(dir / "run1/report.csv").empty();
    report("byte-identical outputs across reruns",
           anoms_equal && reports_equal && nonempty);
    fs::remove_all(dir);
}

// ------------------------------------------------------------ metric rules

void criterion_metric_rules() {
    bool ok = true;

    // worked examples
    {
        GroundTruthWindows t1;
        t1.windows = {{10, 20}};
        auto c = confusion(t1, {{15, 25}});
        ok = ok && c.tp == 1 && c.fp == 0 && c.fn == 0;

        GroundTruthWindows t2;
        t2.windows = {{10, 20}, {40, 50}};
        c = confusion(t2, {{5, 60}, {80, 90}});
        ok = ok && c.tp == 2 && c.fp == 1 && c.fn == 0;

        GroundTruthWindows t3;
        t3.windows = {{10, 20}, {50, 60}};
        c = confusion(t3, {{20, 30}});  // closed intervals: touching counts
        ok = ok && c.tp == 1 && c.fp == 0 && c.fn == 1;
    }

    // randomized comparison against a direct per-window evaluation
    std::mt19937 rng(1005);
    std::uniform_real_distribution<double> pos(0, 500);
    std::uniform_real_distribution<double> len(0, 30);
    std::uniform_int_distribution<int> count(0, 7);
    auto overlaps = [](double a0, double a1, double b0, double b1) {
        return a0 <= b1 && b0 <= a1;
    };
    for (int trial = 0; trial < 200 && ok; ++trial) {
        GroundTruthWindows truth;
        for (int i = count(rng); i-- > 0;) {
            const double s = pos(rng);
            truth.windows.emplace_back(s, s + len(rng));
        }
        std::sort(truth.windows.begin(), truth.windows.end());
        std::vector<PredictedWindow> pred;
        for (int i = count(rng); i-- > 0;) {
            const double s = pos(rng);
            pred.push_back({s, s + len(rng)});
        }
        ConfusionCounts ref;
        for (auto [s, e] : truth.windows) {
            bool hit = false;
            for (const auto& p : pred) hit = hit || overlaps(s, e, p.start, p.end);
            (hit ? ref.tp : ref.fn)++;
        }
        for (const auto& p : pred) {
            bool hit = false;
            for (auto [s, e] : truth.windows) hit = hit || overlaps(s, e, p.start, p.end);
            if (!hit) ref.fp++;
        }
        auto got = confusion(truth, pred);
        ok = got.tp == ref.tp && got.fp == ref.fp && got.fn == ref.fn;
    }
    report("window-overlap metric rules (examples + 200 randomized)", ok);
}

// ----------------------------------------------------------------- pruning

void criterion_pruning() {
    auto seqs_with_peaks = [](const std::vector<double>& peaks) {
        std::vector<AnomalousSequence> out;
        int pos = 0;
        for (double p : peaks) {
            out.push_back({pos, pos + 1, p});
            pos += 10;
        }
        return out;
    };

    bool ok = true;
    {
        // drops 0.5, 0.02: the flat tail from rank 2 on is removed
        auto kept = prune(seqs_with_peaks({10, 5, 4.9, 4.8}), PruneConfig{0.1});
        ok = ok && kept.size() == 2 && kept[0].max_score == 10.0 &&
             kept[1].max_score == 5.0;
    }
    {
        // drops 0.5, 0.6: everything stays
        auto kept = prune(seqs_with_peaks({10, 5, 2}), PruneConfig{0.1});
        ok = ok && kept.size() == 3;
    }

    // pruned count is non-increasing in theta
    std::mt19937 rng(1006);
    std::uniform_real_distribution<double> peak(0.1, 10.0);
    std::uniform_int_distribution<int> count(1, 10);
    for (int trial = 0; trial < 100 && ok; ++trial) {
        std::vector<double> peaks(static_cast<std::size_t>(count(rng)));
        for (auto& p : peaks) p = peak(rng);
        auto seqs = seqs_with_peaks(peaks);
        std::size_t prev = seqs.size() + 1;
        for (double theta : {0.02, 0.05, 0.1, 0.3, 0.6, 0.9}) {
            const auto kept = prune(seqs, PruneConfig{theta}).size();
            ok = ok && kept <= prev;
            prev = kept;
        }
    }
    report("pruning examples and theta monotonicity", ok);
}

}  // namespace

int main() {
    std::cout.setf(std::ios::fixed);
    std::cout.precision(4);

    criterion_dtw_oracle();
    criterion_area_oracle();
    criterion_gradient_check();
    criterion_gp_fixed_points();
    criterion_metric_rules();
    criterion_pruning();
    criterion_determinism();
    criterion_ablation();
    criterion_end_to_end();

    std::cout << (g_failures == 0 ? "ALL CRITERIA PASSED" : "FAILURES PRESENT")
              << std::endl;
    return g_failures == 0 ? 0 : 1;
}
